"""Floating-point special values L(f, 1) of Hecke eigenforms, read off the plus-symbol space.

Used as an oracle independent of the exact pipelines: eigenvalues come from a
joint diagonalization of Hecke matrices on S+, and L(f, 1) from the rapidly
converging series obtained by splitting the Mellin integral at the fixed point
of the Fricke involution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hecke import hecke_matrix
from .manin import build_space


@dataclass
class EigenData:
    coefficients: np.ndarray  # a_1 .. a_nmax (index 0 is a_1)
    root_number: complex  # C in F(1/t) = C t^2 G(t)
    fe_error: float  # functional-equation residual at t = 1.2
    l_value: complex


def _float_matrix(n: int, space) -> np.ndarray:
    m = hecke_matrix(n, space).mat
    return np.array([[float(x) for x in row] for row in m.data], dtype=float).reshape(space.dim, space.dim)


def _series(a: np.ndarray, x: float) -> complex:
    n = np.arange(1, len(a) + 1)
    return complex(np.sum(a * np.exp(-x * n)))


def eigen_data(l: int, nmax: int | None = None, seed: int = 0) -> list[EigenData]:
    """One entry per eigenform in S+ (assumes T_n acts semisimply with simple joint spectrum)."""
    space = build_space(l, "S+")
    if space.dim == 0:
        return []
    if nmax is None:
        nmax = int(8 * math.sqrt(l)) + 10
    mats = [_float_matrix(n, space) for n in range(1, nmax + 1)]
    rng = np.random.default_rng(seed)
    combo = sum(rng.standard_normal() * mats[n - 1] for n in range(2, min(nmax, 12) + 1))
    _, vecs = np.linalg.eig(combo)
    out = []
    scale = 2 * math.pi / math.sqrt(l)
    for k in range(space.dim):
        v = vecs[:, k]
        i = int(np.argmax(np.abs(v)))
        a = np.array([(m @ v)[i] / v[i] for m in mats])
        f1 = _series(a, scale)
        g1 = _series(np.conj(a), scale)
        c = f1 / g1
        t = 1.2
        fe = abs(_series(a, scale / t) - c * t * t * _series(np.conj(a), scale * t))
        n = np.arange(1, nmax + 1)
        w = np.exp(-scale * n) / n
        lval = complex(np.sum(a * w) + c * np.sum(np.conj(a) * w))
        out.append(EigenData(a, c, fe, lval))
    return out


def nonvanishing_count(l: int, tol: float = 1e-6) -> int:
    """Number of eigenforms in S+ with |L(f, 1)| > tol."""
    return sum(1 for e in eigen_data(l) if abs(e.l_value) > tol)
