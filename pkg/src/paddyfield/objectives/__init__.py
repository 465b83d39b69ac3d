"""Benchmark fitness functions and molecule scoring."""

from .analytic import (
    BIMODAL_SUCCESS,
    Bimodal,
    GramacyLeeInterpolation,
    TrigPolynomial,
    bimodal,
    gramacy_lee,
    interpolation_fitness,
    interpolation_mse_batch,
    trig_poly_eval,
)
from .base import FunctionObjective, Objective
from .molecules import (
    MoleculeFeatures,
    MoleculeObjective,
    bos,
    ccs,
    custom_metric,
    rbs,
    read_features,
    read_fingerprint,
    tanimoto,
    tversky,
)
from .surrogate import SURROGATE_ARGMAX, SURROGATE_MAX, SurrogateMLP, surrogate_hyperparam
