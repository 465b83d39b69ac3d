"""Set-similarity and multi-feature molecule scores over precomputed descriptors.

Nothing here perceives chemistry: fingerprints, densities, ring counts and
synthetic-accessibility scores come in from outside (e.g. a features file).
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from typing import Callable, FrozenSet, Iterable, List, Optional, TextIO

from ..errors import DomainError, UsageError
from .base import Objective

# Weights used for the latent-space experiments: generated-only bits are
# penalized by ALPHA, target-only bits by BETA.
DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 0.01

FEATURE_COLUMNS = (
    "id",
    "fingerprint",
    "fp_density",
    "rotatable_bonds",
    "cycle_count",
    "on_bits",
    "sa_score",
    "large_cycle_count",
)


def tversky(x: Iterable[int], y: Iterable[int], alpha: float, beta: float) -> float:
    """``|X & Y| / (|X & Y| + alpha |X - Y| + beta |Y - X|)``."""
    if alpha < 0 or beta < 0:
        raise DomainError("alpha and beta must be non-negative")
    x, y = set(x), set(y)
    if not x and not y:
        raise DomainError("similarity of two empty sets is undefined")
    if not x:
        return 0.0
    common = len(x & y)
    denom = common + alpha * len(x - y) + beta * len(y - x)
    if denom == 0:
        raise DomainError("zero denominator")
    return common / denom


def tanimoto(x: Iterable[int], y: Iterable[int]) -> float:
    return tversky(x, y, 1.0, 1.0)


def rbs(mr: int) -> float:
    """Rotatable bond score: penalizes rigid (<= 2) and floppy (>= 7) molecules."""
    if mr < 0:
        raise DomainError("rotatable bond count must be non-negative")
    if mr <= 2:
        return 2.0 - mr
    if mr >= 7:
        return mr - 5.0
    return 0.0


def ccs(mc: int) -> float:
    """Cycle count score: zero for three to five rings."""
    if mc < 0:
        raise DomainError("cycle count must be non-negative")
    if mc <= 2:
        return float(abs(mc - 2))
    if mc > 5:
        return float(abs(mc - 5))
    return 0.0


def bos(mb: int) -> float:
    """Bit-on score. Negative for fewer than 45 on-bits, as the formula is written."""
    if mb < 0:
        raise DomainError("on-bit count must be non-negative")
    if mb - 45 < 0:
        return 0.6 * (mb - 45)
    return 1.0


@dataclass(frozen=True)
class MoleculeFeatures:
    fingerprint: FrozenSet[int]
    fp_density: float
    rotatable_bonds: int
    cycle_count: int
    on_bits: int
    sa_score: float
    large_cycle_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "fingerprint", frozenset(int(b) for b in self.fingerprint))
        if self.fingerprint and self.on_bits != len(self.fingerprint):
            raise UsageError(
                f"on_bits={self.on_bits} disagrees with a fingerprint of {len(self.fingerprint)} bits"
            )
        for name in ("fp_density", "rotatable_bonds", "cycle_count", "on_bits", "large_cycle_count"):
            if getattr(self, name) < 0:
                raise UsageError(f"{name} must be non-negative")


def custom_metric(
    m: MoleculeFeatures,
    target_fp: Iterable[int],
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
) -> float:
    """``TV * FD^2 * BOS * 0.1**(RBS * CCS) * (1/SA + cycle)``."""
    target_fp = set(target_fp)
    if not target_fp:
        raise DomainError("target fingerprint must be non-empty")
    if not m.sa_score > 0:
        raise DomainError(f"SA score must be positive, got {m.sa_score}")
    tv = tversky(m.fingerprint, target_fp, alpha, beta)
    penalty = 0.1 ** (rbs(m.rotatable_bonds) * ccs(m.cycle_count))
    return tv * m.fp_density ** 2 * bos(m.on_bits) * penalty * (1.0 / m.sa_score + m.large_cycle_count)


# -- file formats --------------------------------------------------------------

_SPLIT = re.compile(r"[\s,;]+")


def parse_bits(text: str) -> FrozenSet[int]:
    """Parse on-bit indices separated by whitespace, commas or semicolons."""
    tokens = [t for t in _SPLIT.split(text.strip()) if t]
    try:
        return frozenset(int(t) for t in tokens)
    except ValueError as exc:
        raise UsageError(f"bad on-bit list {text!r}: {exc}") from None


def read_fingerprint(stream: TextIO) -> FrozenSet[int]:
    """Read a target fingerprint; ``#`` starts a comment."""
    lines = (line.split("#", 1)[0] for line in stream)
    return parse_bits(" ".join(lines))


def read_features(stream: TextIO) -> List[tuple]:
    """Read ``(id, MoleculeFeatures)`` records from a CSV with :data:`FEATURE_COLUMNS`.

    ``on_bits`` may be left blank, in which case the fingerprint size is used.
    """
    reader = csv.DictReader(stream)
    missing = set(FEATURE_COLUMNS) - {"on_bits"} - set(reader.fieldnames or ())
    if missing:
        raise UsageError(f"features file lacks columns: {sorted(missing)}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        try:
            fp = parse_bits(row["fingerprint"] or "")
            on_bits = row.get("on_bits") or ""
            feats = MoleculeFeatures(
                fingerprint=fp,
                fp_density=float(row["fp_density"]),
                rotatable_bonds=int(row["rotatable_bonds"]),
                cycle_count=int(row["cycle_count"]),
                on_bits=int(on_bits) if on_bits.strip() else len(fp),
                sa_score=float(row["sa_score"]),
                large_cycle_count=int(row["large_cycle_count"] or 0),
            )
        except (ValueError, TypeError) as exc:
            raise UsageError(f"line {lineno}: {exc}") from None
        records.append((row["id"], feats))
    return records


def write_features(stream: TextIO, records: Iterable[tuple]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(FEATURE_COLUMNS)
    for ident, m in records:
        writer.writerow([
            ident,
            " ".join(str(b) for b in sorted(m.fingerprint)),
            repr(m.fp_density),
            m.rotatable_bonds,
            m.cycle_count,
            m.on_bits,
            repr(m.sa_score),
            m.large_cycle_count,
        ])


class MoleculeObjective(Objective):
    """Score decoded latent vectors.

    ``decoder`` maps a parameter vector to :class:`MoleculeFeatures` (or
    ``None`` for an invalid decode, scored as ``invalid_fitness``). With
    ``metric="tversky"`` only the similarity term is used.
    """

    def __init__(
        self,
        decoder: Callable[[list], Optional[MoleculeFeatures]],
        target_fp: Iterable[int],
        dimension: int,
        alpha: float = DEFAULT_ALPHA,
        beta: float = DEFAULT_BETA,
        metric: str = "custom",
        invalid_fitness: float = 0.0,
    ):
        if metric not in ("custom", "tversky"):
            raise UsageError(f"unknown metric {metric!r}")
        self.decoder = decoder
        self.target_fp = frozenset(target_fp)
        if not self.target_fp:
            raise UsageError("target fingerprint must be non-empty")
        self.dimension = dimension
        self.alpha, self.beta = alpha, beta
        self.metric = metric
        self.invalid_fitness = invalid_fitness
        self.description = f"{metric} molecule score against a {len(self.target_fp)}-bit target"

    def evaluate(self, params) -> float:
        m = self.decoder(list(params))
        if m is None:
            return self.invalid_fitness
        if self.metric == "tversky":
            return tversky(m.fingerprint, self.target_fp, self.alpha, self.beta)
        return custom_metric(m, self.target_fp, self.alpha, self.beta)
