"""Toric forms modulo Eisenstein series, their Hecke behaviour, and the rank-zero comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .field import CycNum, divisors, euler_phi, prime_factors
from .hecke import hecke_matrix, hecke_span, hecke_symbol, merel_matrices, sturm_bound
from .linalg import QQ, Echelon, Mat, charpoly, poly_eval_matrix
from .manin import DualVec, ManinSpace, build_space, canonical, is_primitive, winding
from .qseries import (
    EisBasis,
    QExpansion,
    default_precision,
    eisenstein_basis,
    s_series,
    tilde_s_coeffs,
)

# ---------------------------------------------------------------------------
# classes modulo E(l)


class ModEisClass:
    """Canonical residual of a series modulo E(l): its values on the non-pivot positions.

    Stored as an integer array (free positions x power-basis coordinates) over one
    denominator, so equality of classes is equality of residuals.
    """

    __slots__ = ("level", "prec", "num", "den")

    def __init__(self, level: int, prec: int, num: np.ndarray, den: int = 1):
        num = np.asarray(num, dtype=object)
        g = math.gcd(den, *num.ravel().tolist()) if num.size else den
        if g > 1:
            num = num // g
            den //= g
        self.level = level
        self.prec = prec
        self.num = num
        self.den = int(den)

    @classmethod
    def zero(cls, basis: EisBasis) -> ModEisClass:
        nfree = basis.prec - basis.rank
        return cls(basis.level, basis.prec, np.zeros((nfree, euler_phi(basis.level)), dtype=object))

    @classmethod
    def of(cls, f: QExpansion, basis: EisBasis) -> ModEisClass:
        cols = basis.residual_columns(f)
        den = 1
        for _, d in cols:
            den = den * d // math.gcd(den, d)
        num = np.stack([r * (den // d) for r, d in cols], axis=1) if cols else np.zeros((0, 0), dtype=object)
        return cls(f.level, f.prec, num, den)

    @property
    def residual(self) -> tuple[CycNum, ...]:
        return tuple(
            CycNum(self.level, [Fraction(int(x), self.den) for x in row]) for row in self.num
        )

    def is_zero(self) -> bool:
        return not self.num.any()

    def __add__(self, other: ModEisClass) -> ModEisClass:
        d = self.den * other.den // math.gcd(self.den, other.den)
        return ModEisClass(self.level, self.prec, self.num * (d // self.den) + other.num * (d // other.den), d)

    def __neg__(self) -> ModEisClass:
        return ModEisClass(self.level, self.prec, -self.num, self.den)

    def __sub__(self, other: ModEisClass) -> ModEisClass:
        return self + (-other)

    def scale(self, c) -> ModEisClass:
        c = Fraction(c)
        return ModEisClass(self.level, self.prec, self.num * c.numerator, self.den * c.denominator)

    def __eq__(self, other):
        if not isinstance(other, ModEisClass):
            return NotImplemented
        return (
            (self.level, self.prec, self.den) == (other.level, other.prec, other.den)
            and bool((self.num == other.num).all())
        )

    __hash__ = None

    def __repr__(self):
        return f"ModEisClass(level={self.level}, prec={self.prec}, zero={self.is_zero()})"


def galois_rank(classes, length: int | None = None) -> int:
    """Dimension over Q(zeta_l) of the span of classes whose span is Galois-stable.

    For a Galois-stable span W, the rational coordinate columns of its vectors
    span the rational subspace W_0 with W = W_0 (x) Q(zeta), so the rank over Q of
    all columns equals the dimension over the cyclotomic field.
    """
    classes = list(classes)
    if not classes:
        return 0
    ech = Echelon(classes[0].num.shape[0] if length is None else length)
    for c in classes:
        for j in range(c.num.shape[1]):
            ech.add_int(c.num[:, j])
    return ech.rank


def cyclotomic_rank(classes) -> int:
    """Dimension over Q(zeta_l) by Gauss-Jordan on CycNum entries (slow, no assumptions)."""
    from .linalg import rank

    classes = list(classes)
    if not classes:
        return 0
    l = classes[0].level
    rows = [list(c.residual) for c in classes]
    return rank(Mat(rows, len(rows[0]), l))


# ---------------------------------------------------------------------------
# products s_a s_b


class ProductTable:
    """Cache of s_a s_b and their classes modulo E(l) at fixed (l, N)."""

    def __init__(self, level: int, prec: int):
        self.level = level
        self.prec = prec
        self.basis = eisenstein_basis(level, prec)
        self._s: dict[int, QExpansion] = {}
        self._prod: dict[tuple[int, int], QExpansion] = {}
        self._cls: dict[tuple[int, int], ModEisClass] = {}

    def canonical_pair(self, a: int, b: int) -> tuple[int, tuple[int, int] | None]:
        """(sign, key) with s_a s_b = sign * product(key); key None means zero."""
        l = self.level
        a %= l
        b %= l
        sign = 1
        if a > l - a:
            a, sign = l - a, -sign
        if b > l - b:
            b, sign = l - b, -sign
        # s_0 is zero by convention and s_{1/2} vanishes identically
        if a == 0 or b == 0 or 2 * a == l or 2 * b == l:
            return 0, None
        return sign, (min(a, b), max(a, b))

    def s(self, a: int) -> QExpansion:
        if a not in self._s:
            self._s[a] = s_series(a, self.level, self.prec)
        return self._s[a]

    def product(self, a: int, b: int) -> QExpansion:
        sign, key = self.canonical_pair(a, b)
        if key is None:
            return QExpansion.zero(self.level, self.prec)
        if key not in self._prod:
            self._prod[key] = self.s(key[0]) * self.s(key[1])
        p = self._prod[key]
        return p if sign > 0 else -p

    def cls(self, a: int, b: int) -> ModEisClass:
        sign, key = self.canonical_pair(a, b)
        if key is None:
            return ModEisClass.zero(self.basis)
        if key not in self._cls:
            self._cls[key] = ModEisClass.of(self.product(*key), self.basis)
        c = self._cls[key]
        return c if sign > 0 else -c

    def representative_pairs(self) -> list[tuple[int, int]]:
        l = self.level
        return [(a, b) for a in range(1, (l + 1) // 2) for b in range(a, (l + 1) // 2)]


_TABLES: dict = {}


def product_table(l: int, prec: int) -> ProductTable:
    key = (l, prec)
    if key not in _TABLES:
        _TABLES[key] = ProductTable(l, prec)
    return _TABLES[key]


def _prec(l: int, prec: int | None) -> int:
    return default_precision(l) if prec is None else prec


def mu(a: int, b: int, l: int, prec: int | None = None) -> ModEisClass:
    """Class of s_{a/l} s_{b/l} modulo E(l); zero when a or b is 0 mod l."""
    return product_table(l, _prec(l, prec)).cls(a, b)


def mu_vector(vec, prec: int | None = None) -> ModEisClass:
    """mu on an element of M- or S- through the representative symbols of the M- basis."""
    space = vec.space
    l = space.level
    if space.kind == "S-":
        vec = space.to_parent(vec)
        space = space.parent
    if space.kind != "M-":
        raise ValueError("mu is defined on M- and S-")
    table = product_table(l, _prec(l, prec))
    out = ModEisClass.zero(table.basis)
    for c, (u, v) in zip(vec.coords, space.basis_symbols):
        if c:
            out = out + table.cls(u, v).scale(c)
    return out


def mu_formal(terms: dict, l: int, prec: int | None = None) -> ModEisClass:
    """mu on a formal sum {(a, b): coefficient} of symbols, termwise."""
    table = product_table(l, _prec(l, prec))
    out = ModEisClass.zero(table.basis)
    for (a, b), c in terms.items():
        if c:
            out = out + table.cls(a, b).scale(c)
    return out


def tilde_product(m: int, n: int, l: int, prec: int) -> QExpansion:
    tm = tilde_s_coeffs(m, l, prec)
    tn = tilde_s_coeffs(n, l, prec)
    out = [sum((tm[i] * tn[k - i] for i in range(k + 1)), Fraction(0)) for k in range(prec)]
    return QExpansion.from_coeffs(l, out)


def wl_mu(m: int, n: int, l: int, prec: int | None = None) -> ModEisClass:
    """Class of the Fricke image tilde s_{m/l} tilde s_{n/l} modulo E(l)."""
    prec = _prec(l, prec)
    basis = eisenstein_basis(l, prec)
    if m % l == 0 or n % l == 0:
        return ModEisClass.zero(basis)
    return ModEisClass.of(tilde_product(m, n, l, prec), basis)


# ---------------------------------------------------------------------------
# lattices and fans


Point = tuple[Fraction, Fraction]


def _cross(a, b) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class Lattice:
    """A rank-two lattice in Q^2 given by a basis (rows)."""

    basis: tuple[Point, Point]

    @property
    def covolume(self) -> Fraction:
        return abs(_cross(*self.basis))

    @property
    def denominator(self) -> int:
        return math.lcm(*(x.denominator for v in self.basis for x in v))

    def contains(self, pt) -> bool:
        (a, b), (c, d) = self.basis
        det = a * d - b * c
        x, y = Fraction(pt[0]), Fraction(pt[1])
        # pt = s * (a, b) + t * (c, d)
        s = (x * d - y * c) / det
        t = (y * a - x * b) / det
        return s.denominator == 1 and t.denominator == 1

    def is_basis(self, u, v) -> bool:
        return self.contains(u) and self.contains(v) and abs(_cross(u, v)) == self.covolume

    def same_as(self, other: Lattice) -> bool:
        return all(other.contains(v) for v in self.basis) and all(self.contains(v) for v in other.basis)


def _is_prime(p: int) -> bool:
    return p >= 2 and prime_factors(p) == [p]


def superlattices(p: int) -> list[Lattice]:
    """The p + 1 lattices Z^2 inside S inside (1/p) Z^2 of index p over Z^2."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    one, zero = Fraction(1), Fraction(0)
    out = [Lattice(((Fraction(1, p), Fraction(t, p)), (zero, one))) for t in range(p)]
    out.append(Lattice(((one, zero), (zero, Fraction(1, p)))))
    return out


QUADRANTS = (((1, 0), (0, 1)), ((0, 1), (-1, 0)), ((-1, 0), (0, -1)), ((0, -1), (1, 0)))


def hull_rays(lat: Lattice, quadrant=((1, 0), (0, 1))) -> list[Point]:
    """Lattice points on the bounded part of the boundary of conv(nonzero points of lat in the
    quadrant), ordered from the first edge vector to the second."""
    e1, e2 = quadrant
    den = lat.denominator
    pts = []
    for i in range(den + 1):
        for j in range(den + 1):
            if i == 0 and j == 0:
                continue
            a, b = Fraction(i, den), Fraction(j, den)
            amb = (a * e1[0] + b * e2[0], a * e1[1] + b * e2[1])
            if lat.contains(amb):
                pts.append((a, b))
    a0 = min(a for a, b in pts if b == 0)
    b0 = min(b for a, b in pts if a == 0)
    pts = [(a, b) for a, b in pts if (a > 0 and b > 0) or (a, b) in ((a0, 0), (0, b0))]
    pts.sort()
    chain: list = []
    for pt in pts:
        while len(chain) >= 2:
            o, q = chain[-2], chain[-1]
            cr = (q[0] - o[0]) * (pt[1] - o[1]) - (q[1] - o[1]) * (pt[0] - o[0])
            if cr < 0:
                chain.pop()
            else:
                break
        chain.append(pt)
        if pt == (a0, 0):
            break
    chain.reverse()
    return [(a * e1[0] + b * e2[0], a * e1[1] + b * e2[1]) for a, b in chain]


@dataclass
class FanData:
    """A complete two-dimensional fan: cyclically ordered rays with degree values."""

    level: int
    rays: list
    degrees: list

    def __post_init__(self):
        self.rays = [(Fraction(x), Fraction(y)) for x, y in self.rays]
        self.degrees = [Fraction(a) for a in self.degrees]
        if len(self.rays) != len(self.degrees) or len(self.rays) < 3:
            raise ValueError("need at least three rays, one degree each")
        k = len(self.rays)
        for i in range(k):
            if _cross(self.rays[i], self.rays[(i + 1) % k]) <= 0:
                raise ValueError(f"rays {i} and {i + 1} are not in counterclockwise position")
        for a in self.degrees:
            if self.level % a.denominator:
                raise ValueError("degree denominators must divide the level")


def square_fan(m: int, n: int, l: int) -> FanData:
    return FanData(
        l,
        [(1, 0), (0, 1), (-1, 0), (0, -1)],
        [Fraction(m, l), Fraction(n, l), Fraction(m, l), Fraction(n, l)],
    )


def fan_form(fd: FanData, prec: int | None = None) -> ModEisClass:
    """Sum of s_{alpha_i} s_{alpha_(i+1)} over adjacent rays with both degrees non-integral."""
    l = fd.level
    table = product_table(l, _prec(l, prec))
    out = ModEisClass.zero(table.basis)
    k = len(fd.rays)
    for i in range(k):
        x, y = fd.degrees[i], fd.degrees[(i + 1) % k]
        if x.denominator == 1 or y.denominator == 1:
            continue
        out = out + table.cls(int(x * l), int(y * l))
    return out


def superlattice_fan(lat: Lattice, m: int, n: int, l: int, p: int) -> FanData:
    """The square fan subdivided by hull points of lat, with degree p * (m|x| + n|y|)/l."""
    rays = []
    for quad in QUADRANTS:
        rays.extend(hull_rays(lat, quad)[:-1])
    degs = [p * (m * abs(x) + n * abs(y)) / l for x, y in rays]
    return FanData(l, rays, degs)


def merel_product_class(m: int, n: int, l: int, p: int, prec: int | None = None) -> ModEisClass:
    """sum over Merel matrices of determinant p of s_{(am+cn)/l} s_{(bm+dn)/l}, integral degrees skipped."""
    table = product_table(l, _prec(l, prec))
    out = ModEisClass.zero(table.basis)
    for g in merel_matrices(p):
        x, y = (g.a * m + g.c * n) % l, (g.b * m + g.d * n) % l
        if x and y:
            out = out + table.cls(x, y)
    return out


@dataclass
class HeckeToricResult:
    ok: bool
    symbol_side: ModEisClass
    merel_side: ModEisClass
    superlattice_side: ModEisClass
    route: str


def hecke_toric_check(m: int, n: int, l: int, p: int, prec: int | None = None) -> HeckeToricResult:
    """Compare mu(T_p (m,n)_-) with the Merel product sum and with the superlattice sum / 4."""
    prec = _prec(l, prec)
    if prec < sturm_bound(l):
        raise ValueError("precision below the Sturm bound")
    if not _is_prime(p) or l % p == 0:
        raise ValueError("p must be a prime not dividing l")
    terms = hecke_symbol(p, (m, n), l)
    if is_primitive(m, n, l):
        space = build_space(l, "M-")
        left = mu_vector(space.formal(terms), prec)
        route = "symbols"
    else:
        # a degenerate symbol has no class in M-; apply mu termwise
        terms = {}
        for g in merel_matrices(p):
            key = (g.a * m + g.c * n, g.b * m + g.d * n)
            terms[key] = terms.get(key, 0) + 1
        left = mu_formal(terms, l, prec)
        route = "formal"
    right = merel_product_class(m, n, l, p, prec)
    lattice_sum = ModEisClass.zero(eisenstein_basis(l, prec))
    for lat in superlattices(p):
        lattice_sum = lattice_sum + fan_form(superlattice_fan(lat, m, n, l, p), prec)
    lattice_sum = lattice_sum.scale(Fraction(1, 4))
    return HeckeToricResult(left == right and lattice_sum == right, left, right, lattice_sum, route)


# ---------------------------------------------------------------------------
# rho, rho_1 and their difference


def rho_series(phi: DualVec, prec: int) -> QExpansion:
    """-sum_n q^n phi(T_n (0,1)) with the functional read on plus-symmetrized symbols."""
    l = phi.space.level
    coeffs = [Fraction(0)] * prec
    for n in range(1, prec):
        coeffs[n] = -sum((phi.plus(g.c, g.d) for g in merel_matrices(n)), Fraction(0))
    return QExpansion.from_coeffs(l, coeffs)


def _poly_mul_trunc(a: list, b: list, prec: int) -> list:
    out = [0] * prec
    for i, x in enumerate(a):
        if x:
            for j in range(prec - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def rho1_series(phi: DualVec, prec: int) -> QExpansion:
    """(1/12) sum_{a,b} (phi((a,a-b)+) - phi((a,a+b)+)) tilde s_a tilde s_b."""
    l = phi.space.level
    # integer tilde series: 2l * tilde s_a
    tl = [[int(x * 2 * l) for x in tilde_s_coeffs(a, l, prec)] for a in range(l)]
    total = [Fraction(0)] * prec
    for a in range(1, l):
        inner = [Fraction(0)] * prec
        for b in range(1, l):
            c = phi.plus(a, a - b) - phi.plus(a, a + b)
            if c:
                for k in range(prec):
                    if tl[b][k]:
                        inner[k] += c * tl[b][k]
        if any(inner):
            prod = _poly_mul_trunc(tl[a], inner, prec)
            for k in range(prec):
                total[k] += prod[k]
    scale = Fraction(1, 12 * 4 * l * l)
    return QExpansion.from_coeffs(l, [x * scale for x in total])


def discrepancy_series(phi: DualVec, prec: int) -> QExpansion:
    """-(2/3) sum q^n sum_{k|n} (n/k) phi((k,0)+) - (2/(3l)) sum q^n sum_{k|n} k sum_b phi((k,b)+)."""
    l = phi.space.level
    col0 = {k: phi.plus(k, 0) for k in range(l)}
    rows = {k: sum((phi.plus(k, b) for b in range(l)), Fraction(0)) for k in range(l)}
    coeffs = [Fraction(0)] * prec
    for n in range(1, prec):
        acc = Fraction(0)
        for k in divisors(n):
            acc -= Fraction(2, 3) * (n // k) * col0[k % l]
            acc -= Fraction(2, 3 * l) * k * rows[k % l]
        coeffs[n] = acc
    return QExpansion.from_coeffs(l, coeffs)


def keytheorem_defect(phi: DualVec, prec: int) -> list[Fraction]:
    """Coefficients of q^1..q^(prec-1) of rho1 - rho - discrepancy (all zero when the identity holds)."""
    d = rho1_series(phi, prec) - rho_series(phi, prec) - discrepancy_series(phi, prec)
    return d.rational_coeffs()[1:]


# ---------------------------------------------------------------------------
# rank zero comparison


@dataclass
class RankZeroReport:
    level: int
    toric_dim: int
    winding_dim: int
    metadata: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.toric_dim == self.winding_dim

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "toricDim": self.toric_dim,
            "windingDim": self.winding_dim,
            "agree": self.agree,
            "metadata": self.metadata,
        }


def toric_dim(l: int, prec: int | None = None) -> int:
    """Dimension of span{s_a s_b : 1 <= a, b < l} modulo E(l)."""
    table = product_table(l, _prec(l, prec))
    # s_{l-a} = -s_a, so representatives with a, b <= l/2 span the same space
    return galois_rank(table.cls(a, b) for a, b in table.representative_pairs()) if l > 2 else 0


def _admissible_primes(l: int):
    p = 7
    while True:
        if _is_prime(p) and l % p:
            yield p
        p += 1


@dataclass
class EisensteinComplement:
    """Hecke-stable complement of S+ inside M+: the image of g(T_p) with g the
    characteristic polynomial of T_p on S+."""

    prime: int
    basis: list
    dim: int


def eisenstein_complement(l: int, max_tries: int = 5) -> EisensteinComplement:
    mplus = build_space(l, "M+")
    splus = build_space(l, "S+")
    sub_basis = [list(v) for v in splus.sub.basis]
    primes = _admissible_primes(l)
    for _ in range(max_tries):
        p = next(primes)
        g = charpoly(hecke_matrix(p, splus).mat)
        gm = poly_eval_matrix(g, hecke_matrix(p, mplus).mat)
        ech = Echelon(mplus.dim)
        for col in gm.T.data if mplus.dim else []:
            ech.add(col)
        eis = ech.basis()
        both = ech.copy()
        for v in sub_basis:
            both.add(v)
        if len(eis) + len(sub_basis) == mplus.dim and both.rank == mplus.dim:
            return EisensteinComplement(p, eis, len(eis))
    raise ArithmeticError(f"no admissible prime produced a complement of S+ at level {l}")


def winding_dim(l: int, budget: int = 200) -> tuple[int, dict]:
    """Dimension of the Hecke module of the winding element in M+ modulo the Eisenstein part."""
    mplus = build_space(l, "M+")
    if mplus.dim == 0:
        return 0, {"heckeSpanDim": 0, "lastN": 0, "eisensteinPrime": None}
    comp = eisenstein_complement(l)
    span = hecke_span(winding(mplus), mplus, budget=budget)
    if not span.stabilized:
        raise ArithmeticError(f"Hecke span of the winding element did not stabilize within n <= {budget}")
    ech = Echelon(mplus.dim)
    for v in comp.basis:
        ech.add(v)
    for v in span.basis:
        ech.add(v)
    meta = {"heckeSpanDim": span.dim, "lastN": span.last_n, "eisensteinPrime": comp.prime, "eisensteinDim": comp.dim}
    return ech.rank - comp.dim, meta


def rank_zero_dims(l: int, prec: int | None = None, budget: int = 200) -> RankZeroReport:
    prec = _prec(l, prec)
    if prec < sturm_bound(l):
        raise ValueError("precision below the Sturm bound")
    td = toric_dim(l, prec)
    wd, meta = winding_dim(l, budget)
    meta.update({"prec": prec, "budget": budget, "sturm": sturm_bound(l)})
    return RankZeroReport(l, td, wd, meta)


def gamma0_products_dim(l: int, prec: int | None = None) -> int:
    """Dimension modulo E(l) of the span of sum_{k in (Z/l)^*} s_{ka} s_{kb}."""
    table = product_table(l, _prec(l, prec))
    units = [k for k in range(1, l) if math.gcd(k, l) == 1]
    classes = []
    for a, b in table.representative_pairs():
        acc = ModEisClass.zero(table.basis)
        for k in units:
            acc = acc + table.cls(k * a, k * b)
        classes.append(acc)
    return galois_rank(classes) if classes else 0


def eisenstein_codimension(l: int, prec: int | None = None) -> dict:
    """dim E(l) - dim(E(l) intersect toric span), with the toric span taken in full coordinates."""
    prec = _prec(l, prec)
    table = product_table(l, prec)
    eis = table.basis
    toric = Echelon(prec)
    both = eis.ech.copy()
    for a, b in table.representative_pairs():
        f = table.product(a, b)
        for j in range(f.num.shape[1]):
            toric.add_int(f.num[:, j])
            both.add_int(f.num[:, j])
    inter = eis.rank + toric.rank - both.rank
    return {
        "eisensteinDim": eis.rank,
        "toricDim": toric.rank,
        "sumDim": both.rank,
        "intersectionDim": inter,
        "codimension": eis.rank - inter,
    }


def image_dims(l: int, prec: int | None = None) -> tuple[int, int]:
    """(dim mu(M-), dim mu(S-)) modulo E(l)."""
    mm = build_space(l, "M-")
    sm = build_space(l, "S-")
    a = galois_rank(mu_vector(v, prec) for v in mm.basis()) if mm.dim else 0
    b = galois_rank(mu_vector(v, prec) for v in sm.basis()) if sm.dim else 0
    return a, b

