"""Python bindings for the til library."""

import json as _json

from . import _til
from ._til import (
    DimensionError,
    DomainError,
    Error,
    NumericalError,
    ParseError,
    SymTensor4,
    beta_star,
    curie_weiss_potential,
    derivative_matrix,
    dirichlet_form,
    hitting_medians,
    influence_matrix,
    injective_norm,
    max_dimension,
    mixing_time,
    sample_gaussian_tensor,
    smoothed_projection,
    spin_glass_constant,
    spin_matrix,
)


def spectral_gap(H, n):
    return _json.loads(_til.spectral_gap(H, n))


def certificate(T, starts=64, seed=0):
    return _json.loads(_til.certificate(T, starts, seed))


def decompose(T, phi="magnetization", seed=0, samples=1, delta=1e-3, dt_rel=1e-3):
    return [_json.loads(s) for s in _til.decompose(T, phi, seed, samples, delta, dt_rel)]
