"""Truncated q-expansions over Q(zeta_l), the toric Eisenstein series and a theta oracle.

A series is stored as an integer array ``num`` of shape (prec, phi(l)) of
power-basis coordinates together with one common denominator ``den``.
Products are computed in the group ring Q[Z/l] (cyclic convolution in the
zeta direction) and reduced modulo Phi_l afterwards.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .field import CycNum, cyc_context, divisors, euler_phi
from .linalg import Echelon

_I64_LIMIT = 2**62


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _obj(arr) -> np.ndarray:
    return np.asarray(arr, dtype=object)


class QExpansion:
    """c_0 + c_1 q + ... + c_{prec-1} q^{prec-1} with coefficients in Q(zeta_level)."""

    __slots__ = ("level", "prec", "num", "den")

    def __init__(self, level: int, num: np.ndarray, den: int = 1):
        num = _obj(num)
        if num.ndim != 2 or num.shape[1] != euler_phi(level):
            raise ValueError("coefficient array must have shape (prec, phi(level))")
        if den <= 0:
            raise ValueError("denominator must be positive")
        g = math.gcd(den, *num.ravel().tolist()) if num.size else den
        if g > 1:
            num = num // g
            den //= g
        self.level = level
        self.prec = num.shape[0]
        self.num = num
        self.den = int(den)

    # -- constructors
    @classmethod
    def zero(cls, level: int, prec: int) -> QExpansion:
        return cls(level, np.zeros((prec, euler_phi(level)), dtype=object))

    @classmethod
    def one(cls, level: int, prec: int) -> QExpansion:
        num = np.zeros((prec, euler_phi(level)), dtype=object)
        num[0, 0] = 1
        return cls(level, num)

    @classmethod
    def from_coeffs(cls, level: int, coeffs) -> QExpansion:
        """From a list of CycNum / rational coefficients."""
        phi = euler_phi(level)
        cyc = [c if isinstance(c, CycNum) else CycNum(level, [c]) for c in coeffs]
        den = 1
        for c in cyc:
            for x in c.coords:
                den = _lcm(den, x.denominator)
        num = np.zeros((len(cyc), phi), dtype=object)
        for i, c in enumerate(cyc):
            for j, x in enumerate(c.coords):
                num[i, j] = int(x * den)
        return cls(level, num, den)

    @classmethod
    def from_group_ring(cls, level: int, const: CycNum, gr: np.ndarray) -> QExpansion:
        """Series whose constant term is `const` and whose q^d coefficient (d >= 1)
        is sum_j gr[d, j] zeta^j with integer gr of shape (prec, level)."""
        ctx = cyc_context(level)
        body = _obj(gr) @ ctx.reduction
        den = 1
        for x in const.coords:
            den = _lcm(den, x.denominator)
        num = body * den
        num[0, :] = [int(x * den) for x in const.coords]
        return cls(level, num, den)

    # -- access
    def coeff(self, n: int) -> CycNum:
        return CycNum(self.level, [Fraction(int(x), self.den) for x in self.num[n]])

    @property
    def coeffs(self) -> list[CycNum]:
        return [self.coeff(n) for n in range(self.prec)]

    @property
    def constant(self) -> CycNum:
        return self.coeff(0)

    def is_rational(self) -> bool:
        return not self.num[:, 1:].any()

    def rational_coeffs(self) -> list[Fraction]:
        if not self.is_rational():
            raise ValueError("series has irrational coefficients")
        return [Fraction(int(x), self.den) for x in self.num[:, 0]]

    def is_zero(self) -> bool:
        return not self.num.any()

    def __repr__(self):
        return f"QExpansion(level={self.level}, prec={self.prec})"

    def _check(self, other: QExpansion):
        if not isinstance(other, QExpansion):
            raise TypeError("expected a QExpansion")
        if (self.level, self.prec) != (other.level, other.prec):
            raise ValueError(
                f"tag mismatch: (level, prec) {(self.level, self.prec)} vs {(other.level, other.prec)}"
            )

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        return (
            self.level == other.level
            and self.prec == other.prec
            and self.den == other.den
            and bool((self.num == other.num).all())
        )

    __hash__ = None

    # -- arithmetic
    def __add__(self, other: QExpansion) -> QExpansion:
        self._check(other)
        d = _lcm(self.den, other.den)
        return QExpansion(self.level, self.num * (d // self.den) + other.num * (d // other.den), d)

    def __neg__(self) -> QExpansion:
        return QExpansion(self.level, -self.num, self.den)

    def __sub__(self, other: QExpansion) -> QExpansion:
        return self + (-other)

    def scale(self, c) -> QExpansion:
        if isinstance(c, CycNum):
            if c.is_rational():
                c = c.coords[0]
            else:
                return self * QExpansion.from_coeffs(self.level, [c] + [0] * (self.prec - 1))
        c = Fraction(c)
        return QExpansion(self.level, self.num * c.numerator, self.den * c.denominator)

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            return self.scale(other)
        self._check(other)
        num = series_product(self.level, self.num, other.num)
        return QExpansion(self.level, num, self.den * other.den)

    def __rmul__(self, other):
        return self.scale(other)

    def lift(self, t: int) -> QExpansion:
        """f(q) -> f(q^t), same precision."""
        num = np.zeros_like(self.num)
        num[::t] = self.num[: (self.prec - 1) // t + 1]
        return QExpansion(self.level, num, self.den)

    def truncate(self, prec: int) -> QExpansion:
        if prec > self.prec:
            raise ValueError("cannot raise precision")
        return QExpansion(self.level, self.num[:prec], self.den)

    def drop_constant(self) -> QExpansion:
        num = self.num.copy()
        num[0, :] = 0
        return QExpansion(self.level, num, self.den)

    def evaluate(self, tau: complex) -> complex:
        """Numerical value at q = exp(2 pi i tau) with the embedding zeta -> exp(2 pi i / l)."""
        q = cmath.exp(2j * math.pi * tau)
        w = cmath.exp(2j * math.pi / self.level)
        wp = np.array([w**j for j in range(self.num.shape[1])])
        vals = self.num.astype(float) @ wp / self.den
        return complex(sum(v * q**n for n, v in enumerate(vals)))

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "prec": self.prec,
            "coeffs": [c.to_json()["coords"] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, d: dict) -> QExpansion:
        coeffs = [CycNum(d["level"], [Fraction(x) for x in c]) for c in d["coeffs"]]
        return cls.from_coeffs(d["level"], coeffs)


def _circulant_index(l: int) -> np.ndarray:
    return (np.arange(l)[None, :] - np.arange(l)[:, None]) % l


def series_product(level: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of two power-basis coefficient arrays (integers)."""
    ctx = cyc_context(level)
    prec, phi = a.shape
    l = level
    amax = max((abs(int(x)) for x in a.ravel()), default=0)
    bmax = max((abs(int(x)) for x in b.ravel()), default=0)
    if amax == 0 or bmax == 0:
        return np.zeros((prec, phi), dtype=object)
    fits = amax * bmax * phi * prec < _I64_LIMIT
    dtype = np.int64 if fits else object
    ga = np.zeros((prec, l), dtype=dtype)
    gb = np.zeros((prec, l), dtype=dtype)
    ga[:, :phi] = a
    gb[:, :phi] = b
    out = np.zeros((prec, l), dtype=dtype)
    idx = _circulant_index(l)
    for i in range(prec):
        row = ga[i]
        if not row.any():
            continue
        out[i:] += gb[: prec - i] @ row[idx]
    if fits:
        # entries of out are bounded by amax*bmax*phi*prec; reduction rows are small
        red = ctx.reduction_i64
        rmax = int(np.abs(red).max()) if red.size else 1
        if int(np.abs(out).max()) * rmax * l < _I64_LIMIT:
            return _obj(out @ red)
        return _obj(out) @ ctx.reduction
    return out @ ctx.reduction


# ---------------------------------------------------------------------------
# explicit series


def _divisor_table(prec: int):
    """Pairs (k, d) with k | d, 1 <= d < prec, grouped by k."""
    return [(k, np.arange(k, prec, k)) for k in range(1, prec)]


def s_series(a: int, l: int, prec: int) -> QExpansion:
    """(w^a + 1)/(2(w^a - 1)) - sum_d q^d sum_{k|d} (w^{ka} - w^{-ka})."""
    if a % l == 0:
        raise ValueError("s_{a/l} needs a != 0 mod l")
    wa = CycNum.zeta(l, a)
    const = (wa + 1) / ((wa - 1) * 2)
    gr = np.zeros((prec, l), dtype=np.int64)
    for k, ds in _divisor_table(prec):
        gr[ds, (k * a) % l] -= 1
        gr[ds, (-k * a) % l] += 1
    return QExpansion.from_group_ring(l, const, gr)


def s2_series(a: int, l: int, prec: int) -> QExpansion:
    """-w^a/(w^a - 1)^2 - 1/12 - sum_d q^d sum_{k|d} k (w^{ka} + w^{-ka} - 2).

    The constant is (3/sin^2(pi a/l) - 1)/12, which makes s^2 + s2 have constant 1/6.
    """
    if a % l == 0:
        raise ValueError("s2_{a/l} needs a != 0 mod l")
    wa = CycNum.zeta(l, a)
    const = -wa / ((wa - 1) * (wa - 1)) - Fraction(1, 12)
    gr = np.zeros((prec, l), dtype=np.int64)
    for k, ds in _divisor_table(prec):
        gr[ds, (k * a) % l] -= k
        gr[ds, (-k * a) % l] -= k
        gr[ds, 0] += 2 * k
    return QExpansion.from_group_ring(l, const, gr)


def s_sq_plus_s2_series(a: int, l: int, prec: int) -> QExpansion:
    """1/6 - 2 sum_d q^d sum_{k|d} (d/k)(w^{ak} + w^{-ak})."""
    if a % l == 0:
        raise ValueError("needs a != 0 mod l")
    const = CycNum(l, [Fraction(1, 6)])
    gr = np.zeros((prec, l), dtype=np.int64)
    for k, ds in _divisor_table(prec):
        gr[ds, (k * a) % l] -= 2 * (ds // k)
        gr[ds, (-k * a) % l] -= 2 * (ds // k)
    return QExpansion.from_group_ring(l, const, gr)


def tilde_s_coeffs(a: int, l: int, prec: int) -> list[Fraction]:
    """Rational coefficients of the Fricke image tilde s_{a/l}; zero for a = 0 mod l."""
    a %= l
    out = [Fraction(0)] * prec
    if a == 0:
        return out
    out[0] = Fraction(a, l) - Fraction(1, 2)
    for k in range(1, prec):
        delta = (1 if k % l == a else 0) - (1 if k % l == (-a) % l else 0)
        if delta:
            for d in range(k, prec, k):
                out[d] -= delta
    return out


def tilde_s_series(a: int, l: int, prec: int) -> QExpansion:
    return QExpansion.from_coeffs(l, tilde_s_coeffs(a, l, prec))


def sigma1(n: int) -> int:
    return sum(divisors(n))


def e2_coeffs(prec: int) -> list[int]:
    return [1] + [-24 * sigma1(n) for n in range(1, prec)]


def e2_series(prec: int, level: int = 1) -> QExpansion:
    """E_2 = 1 - 24 sum sigma_1(n) q^n (quasi-modular), tagged with `level`."""
    return QExpansion.from_coeffs(level, e2_coeffs(prec))


def e2_level_family(l: int, prec: int) -> list[QExpansion]:
    """E_2(tau) - t E_2(t tau) for every divisor t > 1 of l."""
    e2 = e2_series(prec, l)
    return [e2 - e2.lift(t).scale(t) for t in divisors(l) if t > 1]


# ---------------------------------------------------------------------------
# Eisenstein space


def eisenstein_dimension(l: int) -> int:
    """Dimension of the weight-two Eisenstein space of Gamma_1(l): #cusps - 1."""
    from .manin import cusp_classes

    return len(cusp_classes(l)) - 1


def eisenstein_generators(l: int, prec: int) -> list[QExpansion]:
    """Toric Eisenstein series s2_{a/l}, s_{a/l}^2 + s2_{a/l} with their lifts q -> q^t
    (t | gcd(a, l)), and the E_2 level differences."""
    gens = []
    for a in range(1, l // 2 + 1):
        g = math.gcd(a, l)
        base = [s2_series(a, l, prec), s_sq_plus_s2_series(a, l, prec)]
        for t in divisors(g):
            gens.extend(f.lift(t) if t > 1 else f for f in base)
    gens.extend(e2_level_family(l, prec))
    return gens


def orbit_eisenstein_series(v1: int, r: int, l: int, prec: int) -> QExpansion:
    """Holomorphic Gamma_1(l)-orbit sum of the level-l weight-two Eisenstein series.

    With g = gcd(v1, l) this is, up to normalization, sum_j G^{(v1, r + g j)} minus the
    multiple of E_2 that cancels the non-holomorphic term:
    g/(12 l) + sum_D q^D [ sum_{e m = D} m (delta(e = v1/g) z^{r m} + delta(e = -v1/g) z^{-r m})
    - (2 g / l) sigma_1(D) ], congruences on e taken mod l/g, z = zeta_l^{l/g}.
    """
    v1 %= l
    if v1 == 0:
        raise ValueError("v1 must be nonzero mod l")
    g = math.gcd(v1, l)
    h = l // g
    e0 = (v1 // g) % h
    step = h * r
    gr = np.zeros((prec, l), dtype=object)
    for e in range(1, prec):
        hit_pos = e % h == e0
        hit_neg = e % h == (-e0) % h
        if not (hit_pos or hit_neg):
            continue
        for m in range(1, (prec - 1) // e + 1):
            d = e * m
            if hit_pos:
                gr[d, (step * m) % l] += m
            if hit_neg:
                gr[d, (-step * m) % l] += m
    body = QExpansion.from_group_ring(l, CycNum(l, [Fraction(g, 12 * l)]), gr)
    corr = QExpansion.from_coeffs(l, [0] + [Fraction(-2 * g * sigma1(d), l) for d in range(1, prec)])
    return body + corr


def orbit_generators(l: int, prec: int) -> list[QExpansion]:
    """All orbit sums with 0 < v1 <= l/2 and 0 <= r < gcd(v1, l)."""
    out = []
    for v1 in range(1, l // 2 + 1):
        g = math.gcd(v1, l)
        for r in range(g):
            out.append(orbit_eisenstein_series(v1, r, l, prec))
    return out


class EisBasis:
    """Rational echelon basis of the truncated Eisenstein space E(l).

    Every generator family used here is Galois-stable, so the Q(zeta)-span is
    the extension of scalars of the Q-span of all power-basis coordinate
    columns; we store the latter.
    """

    def __init__(self, level: int, prec: int, generators=None):
        self.level = level
        self.prec = prec
        self.ech = Echelon(prec)
        self.expected = eisenstein_dimension(level) if level >= 2 else 0
        gens = eisenstein_generators(level, prec) if generators is None else generators
        self._absorb(gens)
        self.toric_rank = self.ech.rank
        # the toric family misses part of E(l) at many composite levels; fill the
        # gap with orbit sums, which span E(l) on their own
        self.supplemented = False
        if generators is None and self.toric_rank < self.expected:
            self._absorb(orbit_generators(level, prec))
            self.supplemented = True
        self.rank = self.ech.rank
        self._ech_const = None

    @classmethod
    def from_rows(cls, level: int, prec: int, rows: dict, toric_rank: int, supplemented: bool) -> EisBasis:
        """Rebuild from stored echelon rows {pivot: integer row}."""
        b = cls.__new__(cls)
        b.level, b.prec = level, prec
        b.ech = Echelon(prec)
        b.ech.rows = {int(k): np.array([int(x) for x in v], dtype=object) for k, v in rows.items()}
        b.expected = eisenstein_dimension(level) if level >= 2 else 0
        b.toric_rank = toric_rank
        b.supplemented = supplemented
        b.rank = b.ech.rank
        b._ech_const = None
        return b

    def rows_json(self) -> dict:
        return {str(k): [str(int(x)) for x in v] for k, v in sorted(self.ech.rows.items())}

    def _absorb(self, gens):
        for f in gens:
            for col in _columns(f):
                self.ech.add_int(col)

    @property
    def pivots(self) -> list[int]:
        return self.ech.pivots

    @property
    def free_positions(self) -> list[int]:
        piv = set(self.ech.rows)
        return [i for i in range(self.prec) if i not in piv]

    def with_constants(self) -> Echelon:
        """Echelon of E(l) + C*1, for comparisons that ignore constant terms."""
        if self._ech_const is None:
            e = self.ech.copy()
            v = np.zeros(self.prec, dtype=object)
            v[0] = 1
            e.add_int(v)
            self._ech_const = e
        return self._ech_const

    def residual_columns(self, f: QExpansion, ignore_constant: bool = False) -> list[tuple[np.ndarray, int]]:
        """Per power-basis coordinate: (integer residual on the free positions, denominator)."""
        if (f.level, f.prec) != (self.level, self.prec):
            raise ValueError("tag mismatch between series and Eisenstein basis")
        ech = self.with_constants() if ignore_constant else self.ech
        free = [i for i in range(self.prec) if i not in ech.rows]
        out = []
        for col in _columns(f):
            r, mult = ech.reduce_int(col)
            out.append((r[free], f.den * mult))
        return out

    def reduce(self, f: QExpansion, ignore_constant: bool = False) -> tuple[CycNum, ...]:
        cols = self.residual_columns(f, ignore_constant)
        nfree = len(cols[0][0]) if cols else 0
        return tuple(
            CycNum(self.level, [Fraction(int(r[i]), d) for r, d in cols]) for i in range(nfree)
        )

    def contains(self, f: QExpansion, ignore_constant: bool = False) -> bool:
        return all(not r.any() for r, _ in self.residual_columns(f, ignore_constant))


def _columns(f: QExpansion) -> list[np.ndarray]:
    return [f.num[:, j].copy() for j in range(f.num.shape[1])]


_EIS_CACHE: dict = {}


def eisenstein_basis(l: int, prec: int, strict: bool = True) -> EisBasis:
    """Eisenstein basis at level l and precision prec; raises if its rank falls short."""
    key = (l, prec)
    if key not in _EIS_CACHE:
        _EIS_CACHE[key] = EisBasis(l, prec)
    b = _EIS_CACHE[key]
    if strict and b.rank != b.expected:
        raise ArithmeticError(
            f"Eisenstein basis at level {l}, prec {prec} has rank {b.rank}, expected {b.expected}"
        )
    return b


def reduce_mod_eis(f: QExpansion, basis: EisBasis, ignore_constant: bool = False) -> tuple[CycNum, ...]:
    return basis.reduce(f, ignore_constant)


def default_precision(l: int) -> int:
    from .hecke import sturm_bound

    return sturm_bound(l) + 2


# ---------------------------------------------------------------------------
# numerical theta oracle


def theta_numeric(z: float, tau: complex, tol: float = 1e-15, max_terms: int = 100000) -> complex:
    """(1/2 pi i) d/dz log theta(z, tau) from the Jacobi triple product.

    theta(z) is proportional to (x^{1/2} - x^{-1/2}) prod_n (1 - q^n x)(1 - q^n / x) with
    x = e^{2 pi i z}, so the logarithmic derivative is
    (x + 1)/(2(x - 1)) + sum_n [q^n x^{-1}/(1 - q^n x^{-1}) - q^n x/(1 - q^n x)].
    """
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    x = cmath.exp(2j * math.pi * z)
    q = cmath.exp(2j * math.pi * tau)
    total = (x + 1) / (2 * (x - 1))
    qn = 1 + 0j
    for _ in range(1, max_terms + 1):
        qn *= q
        term = qn / x / (1 - qn / x) - qn * x / (1 - qn * x)
        total += term
        if abs(qn) < tol:
            return total
    raise ArithmeticError("theta product did not converge within the term budget")

