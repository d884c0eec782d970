"""Hecke operators on Manin symbols via Merel's matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .linalg import QQ, Echelon, Mat
from .manin import ManinSpace, SymbolVec, _formal_of, build_space, canonical, is_primitive


@dataclass(frozen=True)
class MerelMatrix:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c


@lru_cache(maxsize=None)
def merel_matrices(n: int) -> tuple[MerelMatrix, ...]:
    """All integer (a, b, c, d) with a > b >= 0, d > c >= 0 and ad - bc = n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for a in range(1, n + 2):
        for b in range(a):
            # d = (n + b c) / a with d > c  <=>  c < n / (a - b)
            cmax = -(-n // (a - b))
            for c in range(cmax):
                num = n + b * c
                if num % a == 0:
                    d = num // a
                    if d > c:
                        out.append(MerelMatrix(a, b, c, d))
    return tuple(out)


def hecke_symbol(n: int, x, l: int) -> dict:
    """T_n(u, v) as a formal sum {canonical symbol: multiplicity}.

    Terms with gcd(l, au + cv, bu + dv) > 1 are dropped (this only happens
    when gcd(n, l) > 1).
    """
    u, v = x
    out: dict = {}
    for m in merel_matrices(n):
        s, t = m.a * u + m.c * v, m.b * u + m.d * v
        if not is_primitive(s, t, l):
            continue
        y = canonical(s, t, l)
        out[y] = out.get(y, 0) + 1
    return out


def hecke_formal(n: int, terms: dict, l: int) -> dict:
    out: dict = {}
    for x, c in terms.items():
        if not c:
            continue
        for y, k in hecke_symbol(n, x, l).items():
            out[y] = out.get(y, 0) + c * k
    return out


@dataclass
class HeckeOp:
    n: int
    space: ManinSpace
    mat: Mat

    def __call__(self, vec: SymbolVec) -> SymbolVec:
        if vec.space is not self.space:
            raise ValueError("vector from a different space")
        return SymbolVec(self.space, tuple(self.mat.apply(list(vec.coords))))


_HECKE_CACHE: dict = {}


def hecke_matrix(n: int, space: ManinSpace) -> HeckeOp:
    """Matrix of T_n in the basis of space (columns are images of basis vectors)."""
    key = (n, space.level, space.kind)
    if key in _HECKE_CACHE:
        return _HECKE_CACHE[key]
    l = space.level
    if space.parent is None:
        cols = [list(space.formal(hecke_formal(n, f, l)).coords) for f in space.basis_formal()]
    else:
        par = hecke_matrix(n, space.parent)
        cols = []
        for v in space.basis():
            img = par(space.to_parent(v))
            cols.append(list(space.from_parent(img).coords))
    if cols:
        mat = Mat(cols, space.dim, QQ).T
    else:
        mat = Mat([], 0, QQ)
    op = HeckeOp(n, space, mat)
    _HECKE_CACHE[key] = op
    return op


def apply_hecke(n: int, vec: SymbolVec) -> SymbolVec:
    """T_n applied to a vector through a formal representative (no full matrix)."""
    sp = vec.space
    return sp.formal(hecke_formal(n, _formal_of(vec), sp.level))


def sturm_bound(l: int) -> int:
    """Weight-two Sturm bound for Gamma_1(l): ceil([SL_2(Z) : Gamma_1(l)] / 6)."""
    from .field import prime_factors

    idx = l * l
    for p in prime_factors(l):
        idx = idx // (p * p) * (p * p - 1)
    if l == 2:
        idx = 3
    return -(-idx // 6)


@dataclass
class HeckeSpan:
    """The span of T_n(seed), 1 <= n <= last_n, as an echelon basis in the space's coordinates."""

    space: ManinSpace
    basis: list
    dims: list = field(default_factory=list)  # dimension after each n
    last_n: int = 0
    stabilized: bool = False

    @property
    def dim(self) -> int:
        return len(self.basis)


def hecke_span(seed: SymbolVec, space: ManinSpace | None = None, budget: int = 200, patience: int = 5) -> HeckeSpan:
    """Grow span{T_n(seed)} until the dimension has been stable for `patience`
    consecutive n and n has reached the Sturm bound; flag if the budget runs out."""
    space = space or seed.space
    if seed.space is not space:
        raise ValueError("seed must lie in the given space")
    ech = Echelon(space.dim)
    sturm = sturm_bound(space.level)
    dims = []
    stable = 0
    stabilized = False
    n = 0
    for n in range(1, budget + 1):
        grew = ech.add(list(apply_hecke(n, seed).coords))
        dims.append(ech.rank)
        stable = 0 if grew else stable + 1
        if stable >= patience and n >= sturm:
            stabilized = True
            break
        if ech.rank == space.dim and n >= sturm:
            stabilized = True
            break
    return HeckeSpan(space, ech.basis(), dims, n, stabilized)
