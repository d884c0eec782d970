"""Manin symbols for Gamma_1(l): the spaces M, M+, M-, their cuspidal parts, duals and pi.

A coset of +-Gamma_1(l) in SL_2(Z) is recorded by the bottom row (u, v) of any
representative, reduced mod l and identified with (-u, -v).  Right
multiplication by sigma = [[0,-1],[1,0]] and tau = [[0,-1],[1,-1]] acts on
bottom rows by (u, v)sigma = (v, -u) and (u, v)tau = (v, -u-v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .field import divisors, euler_phi, prime_factors
from .linalg import QQ, Echelon, Mat, Subspace, kernel_basis

Symbol = tuple  # (u, v) with 0 <= u, v < l

KINDS = ("M", "M+", "M-", "S", "S+", "S-")


def canonical(u: int, v: int, l: int) -> Symbol:
    u, v = u % l, v % l
    w = ((-u) % l, (-v) % l)
    return min((u, v), w)


def is_primitive(u: int, v: int, l: int) -> bool:
    return math.gcd(math.gcd(u, v), l) == 1


def coset_count(l: int) -> int:
    if l <= 2:
        return 3 if l == 2 else 1
    idx = l * l
    for p in prime_factors(l):
        idx = idx // (p * p) * (p * p - 1)
    return idx // 2


@lru_cache(maxsize=None)
def enumerate_cosets(l: int) -> tuple[Symbol, ...]:
    """One canonical symbol per coset of +-Gamma_1(l) in SL_2(Z), sorted."""
    if l <= 1:
        raise ValueError("level must be > 1")
    out = {canonical(u, v, l) for u in range(l) for v in range(l) if is_primitive(u, v, l)}
    return tuple(sorted(out))


def sigma_act(x: Symbol, l: int) -> Symbol:
    u, v = x
    return canonical(v, -u, l)


def tau_act(x: Symbol, l: int) -> Symbol:
    u, v = x
    return canonical(v, -u - v, l)


def tau2_act(x: Symbol, l: int) -> Symbol:
    u, v = x
    return canonical(-u - v, u, l)


def sigma_tau_act(x: Symbol, g: str, l: int) -> Symbol:
    acts = {"sigma": sigma_act, "tau": tau_act, "tau2": tau2_act}
    return acts[g](x, l)


def iota_act(x: Symbol, l: int) -> Symbol:
    u, v = x
    return canonical(-u, v, l)


# ---------------------------------------------------------------------------
# cusps


def lift_to_sl2z(u: int, v: int, l: int) -> tuple[int, int, int, int]:
    """Integers (a, b, c, d) with ad - bc = 1 and (c, d) = (u, v) mod l."""
    u, v = u % l, v % l
    for i in range(0, 4 * l + 4):
        c = u + i * l
        for j in range(0, 4 * l + 4):
            d = v + j * l
            if math.gcd(c, d) == 1:
                # a d - b c = 1
                if c == 0:
                    return 1, 0, 0, 1  # d == 1
                g, x, y = _xgcd(d, c)
                # x d + y c = 1  ->  a = x, b = -y
                return x, -y, c, d
    raise ArithmeticError(f"no SL2 lift for ({u},{v}) mod {l}")


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def cusp_key(num: int, den: int, l: int) -> tuple[int, int]:
    """Canonical Gamma_1(l)-class of the cusp num/den (coprime; den = 0 means infinity).

    num/den ~ num'/den' iff (den', num') = +-(den, num + j den) mod l, i.e.
    den' = +-den mod l and num' = +-num mod gcd(den, l), same sign.
    """
    g = math.gcd(den, l)
    a = (den % l, num % g)
    b = ((-den) % l, (-num) % g)
    return min(a, b)


@dataclass(frozen=True)
class CuspClass:
    numerator: int
    denominator: int
    index: int

    def __str__(self):
        return "oo" if self.denominator == 0 else f"{self.numerator}/{self.denominator}"


def symbol_endpoints(x: Symbol, l: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """(g oo, g 0) as fractions (num, den) for a lift g of the coset x."""
    a, b, c, d = lift_to_sl2z(x[0], x[1], l)
    return (a, c), (b, d)


@lru_cache(maxsize=None)
def cusp_classes(l: int) -> tuple[CuspClass, ...]:
    """Representatives of the cusps of X_1(l), indexed in sorted key order."""
    found: dict[tuple[int, int], tuple[int, int]] = {}
    for x in enumerate_cosets(l):
        for num, den in symbol_endpoints(x, l):
            if den < 0:
                num, den = -num, -den
            key = cusp_key(num, den, l)
            if key not in found:
                found[key] = (num, den)
    out = []
    for i, key in enumerate(sorted(found)):
        num, den = found[key]
        out.append(CuspClass(num, den, i))
    return tuple(out)


@lru_cache(maxsize=None)
def _cusp_index(l: int) -> dict[tuple[int, int], int]:
    return {cusp_key(c.numerator, c.denominator, l): c.index for c in cusp_classes(l)}


def cusp_index(num: int, den: int, l: int) -> int:
    return _cusp_index(l)[cusp_key(num, den, l)]


def cusp_count_formula(l: int) -> int:
    """Number of cusps of X_1(l) from the divisor-sum formula (valid for l >= 5)."""
    return sum(euler_phi(d) * euler_phi(l // d) for d in divisors(l)) // 2


@lru_cache(maxsize=None)
def _cusp_iota(l: int) -> tuple[int, ...]:
    """Index of the image of each cusp class under z -> -conj(z)."""
    return tuple(cusp_index(-c.numerator, c.denominator, l) for c in cusp_classes(l))


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class SymbolVec:
    space: "ManinSpace"
    coords: tuple

    def __add__(self, other: SymbolVec) -> SymbolVec:
        _check_same(self.space, other.space)
        return SymbolVec(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: SymbolVec) -> SymbolVec:
        _check_same(self.space, other.space)
        return SymbolVec(self.space, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> SymbolVec:
        return SymbolVec(self.space, tuple(-a for a in self.coords))

    def scale(self, c) -> SymbolVec:
        return SymbolVec(self.space, tuple(c * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if not isinstance(other, SymbolVec):
            return NotImplemented
        return self.space is other.space and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.space), self.coords))


def _check_same(a, b):
    if a is not b:
        raise ValueError("vectors live in different spaces")


class ManinSpace:
    """Quotient of the formal span of coset symbols by the Manin relations.

    For kinds M, M+, M- this is the quotient itself (with the extra relation
    x -+ iota(x) = 0 for M+-); its basis is the set of "free" symbol classes.
    For kinds S, S+, S- it is the kernel of the boundary map inside the
    corresponding quotient, with an echelon basis in the parent's coordinates.
    """

    def __init__(self, level: int, kind: str):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        if level <= 1:
            raise ValueError("level must be > 1")
        self.level = level
        self.kind = kind
        self.symbols = enumerate_cosets(level)
        self.index = {x: i for i, x in enumerate(self.symbols)}
        self.sign = {"M": 0, "S": 0, "M+": 1, "S+": 1, "M-": -1, "S-": -1}[kind]
        if kind.startswith("M"):
            self.parent = None
            self._build_quotient()
        else:
            self.parent = build_space(level, "M" + kind[1:])
            self._build_cuspidal()

    def __repr__(self):
        return f"ManinSpace(level={self.level}, kind={self.kind!r}, dim={self.dim})"

    # -- quotient construction
    def _build_quotient(self):
        l = self.level
        syms = self.symbols
        # classes under <sigma, iota>: e_{x sigma} = -e_x, e_{iota x} = sign * e_x
        cls_of: dict[Symbol, tuple[int, int]] = {}
        reps: list[Symbol] = []
        zero_classes: set[int] = set()
        for x in syms:
            if x in cls_of:
                continue
            cid = len(reps)
            reps.append(x)
            cls_of[x] = (cid, 1)
            stack = [x]
            while stack:
                y = stack.pop()
                _, s = cls_of[y]
                nbrs = [(sigma_act(y, l), -s)]
                if self.sign:
                    nbrs.append((iota_act(y, l), self.sign * s))
                for z, t in nbrs:
                    if z in cls_of:
                        if cls_of[z][1] != t:
                            zero_classes.add(cid)
                    else:
                        cls_of[z] = (cid, t)
                        stack.append(z)
        ncls = len(reps)
        ech = Echelon(ncls)
        for c in sorted(zero_classes):
            v = [0] * ncls
            v[c] = 1
            ech.add(v)
        seen = set()
        for x in syms:
            if x in seen:
                continue
            orbit = (x, tau_act(x, l), tau2_act(x, l))
            seen.update(orbit)
            v = [0] * ncls
            for y in orbit:
                c, s = cls_of[y]
                v[c] += s
            if any(v):
                ech.add(v)
        pivots = ech.rows
        free = [c for c in range(ncls) if c not in pivots]
        pos = {c: i for i, c in enumerate(free)}
        class_proj: list[dict[int, Fraction]] = []
        for c in range(ncls):
            if c in pos:
                class_proj.append({pos[c]: Fraction(1)})
            else:
                row = pivots[c]
                pv = row[c]
                class_proj.append({pos[f]: Fraction(-int(row[f]), int(pv)) for f in free if row[f]})
        self.proj: list[dict[int, Fraction]] = []
        for x in syms:
            c, s = cls_of[x]
            self.proj.append({k: s * a for k, a in class_proj[c].items()})
        self.basis_symbols = [reps[c] for c in free]
        self.dim = len(free)
        self._class_of = cls_of

    # -- cuspidal construction
    def _build_cuspidal(self):
        par = self.parent
        bmat = par.boundary_matrix()
        ker = kernel_basis(bmat)
        self.sub = ker  # echelon basis of S* inside parent coordinates
        self.dim = ker.dim
        self._pivots = ker.pivots()

    # -- vectors
    def zero(self) -> SymbolVec:
        return SymbolVec(self, tuple([Fraction(0)] * self.dim))

    def basis(self) -> list[SymbolVec]:
        out = []
        for i in range(self.dim):
            v = [Fraction(0)] * self.dim
            v[i] = Fraction(1)
            out.append(SymbolVec(self, tuple(v)))
        return out

    def quotient(self) -> ManinSpace:
        """The quotient space (M, M+ or M-) that holds this space."""
        return self if self.parent is None else self.parent

    def symbol(self, u: int, v: int) -> SymbolVec:
        """Class of the Manin symbol (u, v); zero for degenerate pairs."""
        return self.formal({(u, v): 1})

    def formal(self, terms: dict | Iterable) -> SymbolVec:
        """Project a formal combination {(u, v): coefficient} into the quotient."""
        q = self.quotient()
        if isinstance(terms, dict):
            terms = terms.items()
        acc = [Fraction(0)] * q.dim
        l = self.level
        for (u, v), c in terms:
            if not c or not is_primitive(u, v, l):
                continue
            for k, a in q.proj[q.index[canonical(u, v, l)]].items():
                acc[k] += c * a
        vec = SymbolVec(q, tuple(acc))
        return vec if q is self else self.from_parent(vec)

    def from_parent(self, vec: SymbolVec) -> SymbolVec:
        if self.parent is None:
            return vec
        coords = self.sub.coordinates(list(vec.coords))
        return SymbolVec(self, tuple(coords))

    def to_parent(self, vec: SymbolVec) -> SymbolVec:
        if self.parent is None:
            return vec
        acc = [Fraction(0)] * self.parent.dim
        for c, row in zip(vec.coords, self.sub.basis):
            if c:
                acc = [x + c * y for x, y in zip(acc, row)]
        return SymbolVec(self.parent, tuple(acc))

    def basis_formal(self) -> list[dict[Symbol, Fraction]]:
        """Formal symbol combinations representing each basis vector."""
        if self.parent is None:
            return [{x: Fraction(1)} for x in self.basis_symbols]
        pf = self.parent.basis_formal()
        out = []
        for row in self.sub.basis:
            d: dict[Symbol, Fraction] = {}
            for c, f in zip(row, pf):
                if c:
                    for x, a in f.items():
                        d[x] = d.get(x, Fraction(0)) + c * a
            out.append({x: a for x, a in d.items() if a})
        return out

    # -- relation data
    def relation_rows(self) -> list[dict[Symbol, int]]:
        """All defining relations as formal combinations of canonical symbols."""
        l = self.level
        rows = []
        for x in self.symbols:
            rows.append(_formal_sum([(x, 1), (sigma_act(x, l), 1)]))
            rows.append(_formal_sum([(x, 1), (tau_act(x, l), 1), (tau2_act(x, l), 1)]))
            if self.sign:
                rows.append(_formal_sum([(x, 1), (iota_act(x, l), -self.sign)]))
        return [r for r in rows if r]

    def relation_matrix(self) -> Mat:
        idx = self.index
        rows = []
        for r in self.relation_rows():
            v = [Fraction(0)] * len(self.symbols)
            for x, c in r.items():
                v[idx[x]] += c
            rows.append(v)
        return Mat(rows, len(self.symbols), QQ)

    def proj_matrix(self) -> Mat:
        """Formal symbol coordinates -> quotient coordinates (dim x #symbols)."""
        q = self.quotient()
        cols = []
        for p in q.proj:
            col = [Fraction(0)] * q.dim
            for k, a in p.items():
                col[k] = a
            cols.append(col)
        return Mat(cols, q.dim, QQ).T

    # -- boundary
    def _cusp_target(self) -> tuple[int, list[tuple[int, int]]]:
        """Cusp coordinates for this sign: (#coords, per-cusp (coord index or -1, sign))."""
        l = self.level
        n = len(cusp_classes(l))
        if self.sign == 0:
            return n, [(i, 1) for i in range(n)]
        io = _cusp_iota(l)
        out = []
        orbit_pos: dict[int, int] = {}
        for i in range(n):
            j = io[i]
            rep = min(i, j)
            if self.sign < 0 and i == j:
                out.append((-1, 0))
                continue
            if rep not in orbit_pos:
                orbit_pos[rep] = len(orbit_pos)
            s = 1 if (self.sign > 0 or i == rep) else -1
            out.append((orbit_pos[rep], s))
        return len(orbit_pos), out

    def boundary_formal(self, terms: dict) -> list[Fraction]:
        """Boundary of a formal combination, in this sign's cusp coordinates."""
        l = self.level
        ncoord, target = self._cusp_target()
        acc = [Fraction(0)] * ncoord
        for (u, v), c in terms.items():
            if not c or not is_primitive(u, v, l):
                continue
            inf_end, zero_end = symbol_endpoints(canonical(u, v, l), l)
            for (num, den), s in ((inf_end, 1), (zero_end, -1)):
                k, t = target[cusp_index(num, den, l)]
                if k >= 0:
                    acc[k] += s * t * c
        return acc

    def boundary_matrix(self) -> Mat:
        """Matrix of the boundary map on this space's basis (columns)."""
        ncoord, _ = self._cusp_target()
        cols = [self.boundary_formal(f) for f in self.basis_formal()]
        if not cols:
            return Mat([[] for _ in range(ncoord)], 0, QQ)
        return Mat(cols, ncoord, QQ).T

    def boundary(self, vec: SymbolVec) -> list[Fraction]:
        bm = self.boundary_matrix()
        return bm.apply(list(vec.coords))


def _formal_sum(terms) -> dict:
    d: dict = {}
    for x, c in terms:
        d[x] = d.get(x, 0) + c
    return {x: c for x, c in d.items() if c}


@lru_cache(maxsize=None)
def build_space(level: int, kind: str) -> ManinSpace:
    return ManinSpace(level, kind)


# ---------------------------------------------------------------------------
# involution, symmetrizations, winding element


def _formal_of(vec: SymbolVec) -> dict:
    """A formal representative of a vector of a quotient or cuspidal space."""
    out: dict = {}
    for c, f in zip(vec.coords, vec.space.basis_formal()):
        if c:
            for x, a in f.items():
                out[x] = out.get(x, 0) + c * a
    return out


def iota(vec: SymbolVec) -> SymbolVec:
    """The involution (u, v) -> (-u, v); acts as +-1 on M+- and S+-."""
    sp = vec.space
    if sp.sign:
        return vec.scale(sp.sign)
    l = sp.level
    f = _formal_of(vec)
    return sp.formal({(-u % l, v): c for (u, v), c in f.items()})


def sym_plus(vec: SymbolVec) -> SymbolVec:
    return (vec + iota(vec)).scale(Fraction(1, 2))


def sym_minus(vec: SymbolVec) -> SymbolVec:
    return (vec - iota(vec)).scale(Fraction(1, 2))


def to_signed(vec: SymbolVec, sign: int) -> SymbolVec:
    """Image of an element of M under M -> M+- (the class of its symmetrization)."""
    kind = "M+" if sign > 0 else "M-"
    return build_space(vec.space.level, kind).formal(_formal_of(vec))


def winding(space: ManinSpace) -> SymbolVec:
    """The class of the identity coset, i.e. the path {0, oo}."""
    return space.symbol(0, 1)


# ---------------------------------------------------------------------------
# duals


@dataclass
class DualVec:
    """A functional on M (or M+) given by its values on all coset symbols."""

    space: ManinSpace
    values: dict = field(default_factory=dict)

    def __call__(self, u: int, v: int) -> Fraction:
        return pairing(self, (u, v))

    def plus(self, u: int, v: int) -> Fraction:
        """Value on the symmetrized symbol (u, v)_+."""
        return (self(u, v) + self(-u, v)) / 2

    def is_zero(self) -> bool:
        return not any(self.values.values())

    def __add__(self, other: DualVec) -> DualVec:
        keys = set(self.values) | set(other.values)
        return DualVec(self.space, {k: self.values.get(k, 0) + other.values.get(k, 0) for k in keys})

    def scale(self, c) -> DualVec:
        return DualVec(self.space, {k: c * a for k, a in self.values.items()})

    def iota_twist(self) -> DualVec:
        l = self.space.level
        return DualVec(self.space, {x: self.values.get(iota_act(x, l), Fraction(0)) for x in self.space.symbols})

    def check_constraints(self) -> bool:
        l = self.space.level
        val = lambda x: self.values.get(x, 0)
        for x in self.space.symbols:
            if val(x) + val(sigma_act(x, l)) != 0:
                return False
            if val(x) + val(tau_act(x, l)) + val(tau2_act(x, l)) != 0:
                return False
            if self.space.sign > 0 and val(x) != val(iota_act(x, l)):
                return False
        return True


def pairing(phi: DualVec, y: Symbol) -> Fraction:
    """The intersection pairing of phi with the class of the symbol y: lambda_y."""
    l = phi.space.level
    u, v = y
    if not is_primitive(u, v, l):
        return Fraction(0)
    return Fraction(phi.values.get(canonical(u, v, l), 0))


def dual_basis(space: ManinSpace) -> list[DualVec]:
    """Basis of M* (or M+*): coordinate functionals of the quotient basis, read on every symbol."""
    if space.kind not in ("M", "M+"):
        raise ValueError("dual basis is defined for M and M+")
    out = []
    for j in range(space.dim):
        vals = {x: p.get(j, Fraction(0)) for x, p in zip(space.symbols, space.proj)}
        out.append(DualVec(space, vals))
    return out


def dual_from_coords(space: ManinSpace, coords) -> DualVec:
    """The functional on the quotient with given values on its basis vectors."""
    vals = {}
    for x, p in zip(space.symbols, space.proj):
        vals[x] = sum((coords[k] * a for k, a in p.items()), Fraction(0))
    return DualVec(space, vals)


def pi_full(phi: DualVec, second_form: bool = False) -> SymbolVec:
    """(1/6) sum_x (lambda_{x tau} - lambda_{x tau^2}) {g_x 0, g_x oo}, as an element of M.

    With second_form=True uses lambda_{x sigma tau sigma} in place of lambda_{x tau}.
    """
    if not phi.check_constraints():
        raise ValueError("functional violates the sigma/tau constraints")
    l = phi.space.level
    m = build_space(l, "M")
    terms = {}
    for x in m.symbols:
        if second_form:
            first = sigma_act(tau_act(sigma_act(x, l), l), l)
        else:
            first = tau_act(x, l)
        c = pairing(phi, first) - pairing(phi, tau2_act(x, l))
        if c:
            terms[x] = Fraction(c, 6)
    return m.formal(terms)


def pi_map(phi: DualVec) -> SymbolVec:
    """(1/12) sum_{a,b mod l} phi((a,a-b)_+ - (a,a+b)_+) (a,b)_-, returned as an element of S-."""
    if phi.space.kind != "M+":
        raise ValueError("pi_map expects a functional on M+")
    if not phi.check_constraints():
        raise ValueError("functional violates the sigma/tau constraints")
    l = phi.space.level
    terms = {}
    for a in range(l):
        for b in range(l):
            c = phi.plus(a, a - b) - phi.plus(a, a + b)
            if c:
                terms[(a, b)] = terms.get((a, b), 0) + c / 12
    m_minus = build_space(l, "M-")
    vec = m_minus.formal(terms)
    return build_space(l, "S-").from_parent(vec)
