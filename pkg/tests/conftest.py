"""Shared helpers: independent mini-oracles and random-state factories."""

import numpy as np
import pytest

from spheretop.phase_space import random_phase_state
from spheretop.quaternion import ImaginaryQuaternion, Quaternion
from spheretop.reduction import ReducedState, hilbert_map, left_reduce

# Basis multiplication table for the oracle product, independent of the
# library implementation: (a, b) -> (result basis element, sign).
_BASIS = ("1", "i", "j", "k")
_MUL = {
    ("1", "1"): ("1", 1), ("1", "i"): ("i", 1), ("1", "j"): ("j", 1), ("1", "k"): ("k", 1),
    ("i", "1"): ("i", 1), ("i", "i"): ("1", -1), ("i", "j"): ("k", 1), ("i", "k"): ("j", -1),
    ("j", "1"): ("j", 1), ("j", "i"): ("k", -1), ("j", "j"): ("1", -1), ("j", "k"): ("i", 1),
    ("k", "1"): ("k", 1), ("k", "i"): ("j", 1), ("k", "j"): ("i", -1), ("k", "k"): ("1", -1),
}


def oracle_mul(p, q):
    """Bilinear expansion of the product over the basis table."""
    pc = dict(zip(_BASIS, p.components()))
    qc = dict(zip(_BASIS, q.components()))
    out = {b: 0.0 for b in _BASIS}
    for a, ca in pc.items():
        for b, cb in qc.items():
            basis, sign = _MUL[(a, b)]
            out[basis] += sign * ca * cb
    return Quaternion(out["1"], out["i"], out["j"], out["k"])


def oracle_dot4(p, q):
    return sum(a * b for a, b in zip(p.components(), q.components()))


def quat(w, x, y, z):
    return Quaternion(w, x, y, z)


def imag(x, y, z):
    return ImaginaryQuaternion(x, y, z)


def random_unit(rng):
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return Quaternion(*v)


def random_imag(rng, scale=1.0):
    return ImaginaryQuaternion(*rng.normal(scale=scale, size=3))


def random_reduced_state(rng, scale=0.8, unit_g=True):
    g = rng.normal(size=4)
    if unit_g:
        g /= np.linalg.norm(g)
    return ReducedState(
        A1=random_imag(rng, scale), A2=random_imag(rng, scale), gD=Quaternion(*g)
    )


def random_invariant_point(rng, scale=0.8):
    """On-variety point, generated by pushing a random state through the
    invariant map."""
    return hilbert_map(left_reduce(random_phase_state(rng, momentum_scale=scale)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


__all__ = [
    "oracle_mul", "oracle_dot4", "quat", "imag", "random_unit", "random_imag",
    "random_reduced_state", "random_invariant_point", "random_phase_state",
]
