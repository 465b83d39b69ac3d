"""Save and recover paddy trials as JSON documents (``*.paddy.json``).

Document layout, ``format_version`` 1::

    {
      "format": "paddyfield-trial",
      "format_version": 1,
      "objective": "bimodal",            # optional benchmark name, or null
      "rng": {"algorithm": "PCG64",
              "state": "0x...", "inc": "0x...",
              "has_uint32": 0, "uinteger": 0},
      "space": {"params": [{"name", "kind", "lower_limit", "upper_limit",
                            "init_lo", "init_hi", "resolution", "normalize"}]},
      "config": {"random_seed_count", "threshold", "s_max", "radius",
                 "iterations", "mode", "gaussian", "rng_seed"},
      "iteration": 3,
      "terminated": false,
      "termination_reason": null,        # or "iteration_limit" / "fitness_plateau"
      "plants": [{"id", "params", "deltas", "parent_id", "born_iteration", "fitness"}]
    }

Floats are written with Python's shortest round-trip repr, and the 128-bit
PCG64 words as hex strings, so a loaded state continues exactly like the
original would have.
"""

from __future__ import annotations

import io
import json
import math
import os
from typing import Optional

import jsonschema
import numpy as np

from . import engine
from .engine import Plant, RunnerConfig, RunnerState, Seed, TerminationReason
from .errors import (
    ConfigurationError,
    TrialInvariantError,
    TrialParseError,
    TrialSchemaError,
    TrialVersionError,
)
from .space import SpaceSpec, clamp

FORMAT_NAME = "paddyfield-trial"
FORMAT_VERSION = 1
FILE_SUFFIX = ".paddy.json"

_NUM = {"type": "number"}
_OPT_NUM = {"type": ["number", "null"]}
_INT = {"type": "integer"}
_HEX = {"type": "string", "pattern": "^0x[0-9a-f]+$"}

SCHEMA = {
    "type": "object",
    "required": [
        "format", "format_version", "rng", "space", "config",
        "iteration", "terminated", "termination_reason", "plants",
    ],
    "properties": {
        "format": {"const": FORMAT_NAME},
        "format_version": {"const": FORMAT_VERSION},
        "objective": {"type": ["string", "null"]},
        "rng": {
            "type": "object",
            "required": ["algorithm", "state", "inc", "has_uint32", "uinteger"],
            "properties": {
                "algorithm": {"type": "string"},
                "state": _HEX,
                "inc": _HEX,
                "has_uint32": {"enum": [0, 1]},
                "uinteger": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "space": {
            "type": "object",
            "required": ["params"],
            "properties": {
                "params": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": [
                            "name", "kind", "lower_limit", "upper_limit",
                            "init_lo", "init_hi", "resolution", "normalize",
                        ],
                        "properties": {
                            "name": {"type": "string"},
                            "kind": {"enum": ["continuous", "integer"]},
                            "lower_limit": _OPT_NUM,
                            "upper_limit": _OPT_NUM,
                            "init_lo": _NUM,
                            "init_hi": _NUM,
                            "resolution": _NUM,
                            "normalize": {"type": "boolean"},
                        },
                        "additionalProperties": False,
                    },
                },
            },
            "additionalProperties": False,
        },
        "config": {
            "type": "object",
            "required": [
                "random_seed_count", "threshold", "s_max", "radius",
                "iterations", "mode", "gaussian", "rng_seed",
            ],
            "properties": {
                "random_seed_count": _INT,
                "threshold": _INT,
                "s_max": _INT,
                "radius": _NUM,
                "iterations": _INT,
                "mode": {"enum": ["population", "generational"]},
                "gaussian": {"enum": ["default", "scaled"]},
                "rng_seed": _INT,
            },
            "additionalProperties": False,
        },
        "iteration": {"type": "integer", "minimum": 0},
        "terminated": {"type": "boolean"},
        "termination_reason": {"enum": [None, "iteration_limit", "fitness_plateau"]},
        "plants": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "params", "deltas", "parent_id", "born_iteration", "fitness"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "params": {"type": "array", "items": _NUM},
                    "deltas": {"type": "array", "items": _NUM},
                    "parent_id": {"type": ["integer", "null"]},
                    "born_iteration": {"type": "integer", "minimum": 0},
                    "fitness": _NUM,
                },
                "additionalProperties": False,
            },
        },
    },
}


def to_document(state: RunnerState, objective_name: Optional[str] = None) -> dict:
    rng = state.rng_state
    if rng["bit_generator"] != engine.RNG_ALGORITHM:
        raise TrialVersionError(f"cannot store a {rng['bit_generator']} generator")
    return {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "objective": objective_name,
        "rng": {
            "algorithm": engine.RNG_ALGORITHM,
            "state": hex(rng["state"]["state"]),
            "inc": hex(rng["state"]["inc"]),
            "has_uint32": int(rng["has_uint32"]),
            "uinteger": int(rng["uinteger"]),
        },
        "space": state.space.to_dict(),
        "config": state.config.to_dict(),
        "iteration": state.iteration,
        "terminated": state.terminated,
        "termination_reason": None if state.termination_reason is None else state.termination_reason.value,
        "plants": [
            {
                "id": p.id,
                "params": list(p.params),
                "deltas": list(p.seed.deltas),
                "parent_id": p.seed.parent_id,
                "born_iteration": p.seed.born_iteration,
                "fitness": p.fitness,
            }
            for p in state.population
        ],
    }


def dumps(state: RunnerState, objective_name: Optional[str] = None) -> str:
    return json.dumps(to_document(state, objective_name), indent=1, allow_nan=False) + "\n"


def save(state: RunnerState, destination, objective_name: Optional[str] = None) -> None:
    """Write ``state`` to a path or a writable (text or binary) file object."""
    text = dumps(state, objective_name)
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif isinstance(destination, (io.RawIOBase, io.BufferedIOBase)):
        destination.write(text.encode("utf-8"))
    else:
        destination.write(text)


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def parse_document(text) -> dict:
    """JSON-decode and validate; returns the raw document dict."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TrialParseError(f"trial document is not UTF-8: {exc}") from None
    if not text.strip():
        raise TrialParseError("empty trial document")
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        raise TrialParseError(f"malformed trial document: {exc}") from None
    if not isinstance(doc, dict):
        raise TrialSchemaError("trial document must be a JSON object")
    if doc.get("format") != FORMAT_NAME:
        raise TrialSchemaError(f"not a {FORMAT_NAME} document")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise TrialVersionError(f"unsupported format_version {version!r} (expected {FORMAT_VERSION})")
    algorithm = (doc.get("rng") or {}).get("algorithm") if isinstance(doc.get("rng"), dict) else None
    if algorithm != engine.RNG_ALGORITHM:
        raise TrialVersionError(f"unsupported RNG algorithm {algorithm!r}")
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise TrialSchemaError(f"{path or '<root>'}: {exc.message}") from None
    return doc


def from_document(doc: dict) -> RunnerState:
    try:
        space = SpaceSpec.from_dict(doc["space"])
        config = RunnerConfig.from_dict(doc["config"])
    except ConfigurationError as exc:
        raise TrialInvariantError(str(exc)) from None

    iteration = doc["iteration"]
    if iteration > config.iterations:
        raise TrialInvariantError(f"iteration {iteration} exceeds configured {config.iterations}")
    reason = doc["termination_reason"]
    if doc["terminated"] != (reason is not None):
        raise TrialInvariantError("terminated flag and termination_reason disagree")
    if not doc["plants"]:
        raise TrialInvariantError("a trial has at least one plant")

    population = []
    dim = space.dimension
    for expected_id, raw in enumerate(doc["plants"]):
        pid = raw["id"]
        if pid != expected_id:
            raise TrialInvariantError(f"plant ids must be dense from 0; got {pid} at position {expected_id}")
        if len(raw["params"]) != dim or len(raw["deltas"]) != dim:
            raise TrialInvariantError(f"plant {pid}: expected {dim} params and deltas")
        parent = raw["parent_id"]
        born = raw["born_iteration"]
        if born > iteration:
            raise TrialInvariantError(f"plant {pid} born after the current iteration")
        if parent is None:
            if born != 0:
                raise TrialInvariantError(f"plant {pid}: only generation-0 plants lack a parent")
        elif not 0 <= parent < pid:
            raise TrialInvariantError(f"plant {pid}: parent {parent} must precede it")
        params = tuple(float(v) for v in raw["params"])
        for spec, value in zip(space.params, params):
            if clamp(spec, value) != value:
                raise TrialInvariantError(f"plant {pid}: {spec.name}={value} violates its limits or kind")
        fitness = float(raw["fitness"])
        if not math.isfinite(fitness):
            raise TrialInvariantError(f"plant {pid}: non-finite fitness")
        seed = Seed(pid, params, tuple(float(d) for d in raw["deltas"]), parent, born)
        population.append(Plant(seed, fitness))

    rng_doc = doc["rng"]
    rng = np.random.Generator(np.random.PCG64())
    try:
        rng.bit_generator.state = {
            "bit_generator": engine.RNG_ALGORITHM,
            "state": {"state": int(rng_doc["state"], 16), "inc": int(rng_doc["inc"], 16)},
            "has_uint32": rng_doc["has_uint32"],
            "uinteger": rng_doc["uinteger"],
        }
    except (ValueError, TypeError) as exc:
        raise TrialInvariantError(f"bad RNG state: {exc}") from None

    return RunnerState(
        config=config,
        space=space,
        population=population,
        rng=rng,
        iteration=iteration,
        terminated=doc["terminated"],
        termination_reason=None if reason is None else TerminationReason(reason),
    )


def loads(text) -> RunnerState:
    return from_document(parse_document(text))


def load(source) -> RunnerState:
    """Read a state from a path or a readable (text or binary) file object."""
    return loads(_read(source))


def load_with_objective(source):
    """Like :func:`load` but also returns the stored objective name."""
    doc = parse_document(_read(source))
    return from_document(doc), doc.get("objective")


def _read(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()
