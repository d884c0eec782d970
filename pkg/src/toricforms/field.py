"""Exact scalars: rationals and the cyclotomic field Q(zeta_l) in the power basis."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

Rational = Fraction


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def euler_phi(n: int) -> int:
    r = n
    for p in prime_factors(n):
        r = r // p * (p - 1)
    return r


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("n must be positive")
    p = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        p = _poly_divexact(p, list(cyclotomic_poly(d)))
    return tuple(p)


class _CycContext:
    """Per-level tables: Phi_l and the images of zeta^j (0 <= j < l) in the power basis."""

    def __init__(self, level: int):
        self.level = level
        self.poly = cyclotomic_poly(level)
        self.degree = len(self.poly) - 1
        deg = self.degree
        red = np.zeros((level, deg), dtype=object)
        cur = [0] * deg
        cur[0] = 1
        for j in range(level):
            red[j, :] = cur
            # multiply by x and reduce with the monic Phi
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(deg):
                    cur[i] -= top * self.poly[i]
        self.reduction = red  # integer matrix, rows indexed by exponent mod l
        self.reduction_i64 = red.astype(np.int64)

    def reduce_exponents(self, coeffs) -> list:
        """Power-basis coordinates of sum_j coeffs[j] zeta^j (any length)."""
        out = [0] * self.degree
        l = self.level
        for j, c in enumerate(coeffs):
            if c:
                row = self.reduction[j % l]
                for i in range(self.degree):
                    if row[i]:
                        out[i] += c * row[i]
        return out


@lru_cache(maxsize=None)
def cyc_context(level: int) -> _CycContext:
    if level < 1:
        raise ValueError("level must be >= 1")
    return _CycContext(level)


def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] -= c * bj
        a.pop()
    return q, a


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    for j, y in enumerate(b):
        a[j] -= y
    return _poly_trim(a)


class CycNum:
    """Element of Q(zeta_l), stored as power-basis coordinates modulo Phi_l."""

    __slots__ = ("level", "coords", "_hash")

    def __init__(self, level: int, coords):
        ctx = cyc_context(level)
        coords = [Fraction(c) for c in coords]
        if len(coords) > ctx.degree:
            coords = ctx.reduce_exponents(coords)
            coords = [Fraction(c) for c in coords]
        elif len(coords) < ctx.degree:
            coords = coords + [Fraction(0)] * (ctx.degree - len(coords))
        self.level = level
        self.coords = tuple(coords)
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, level: int) -> CycNum:
        return cls(level, [])

    @classmethod
    def one(cls, level: int) -> CycNum:
        return cls(level, [1])

    @classmethod
    def from_rational(cls, level: int, x) -> CycNum:
        return cls(level, [x])

    @classmethod
    def zeta(cls, level: int, k: int = 1) -> CycNum:
        """The root of unity zeta_l**k."""
        ctx = cyc_context(level)
        return cls(level, list(ctx.reduction[k % level]))

    @classmethod
    def from_group_ring(cls, level: int, coeffs) -> CycNum:
        """sum_j coeffs[j] * zeta^j for an arbitrary-length coefficient list."""
        ctx = cyc_context(level)
        return cls(level, [Fraction(c) for c in ctx.reduce_exponents(coeffs)])

    def _coerce(self, other) -> CycNum:
        if isinstance(other, CycNum):
            if other.level != self.level:
                raise ValueError(f"level mismatch: {self.level} vs {other.level}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum(self.level, [other])
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == other
        if isinstance(other, CycNum):
            return self.level == other.level and self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.level, self.coords))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNum(self.level, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.level, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNum(self.level, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNum(self.level, [a * other for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        x, y = self.coords, other.coords
        prod = [Fraction(0)] * (2 * len(x) - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        return CycNum(self.level, cyc_context(self.level).reduce_exponents(prod))

    __rmul__ = __mul__

    def inverse(self) -> CycNum:
        """Multiplicative inverse via the extended Euclidean algorithm over Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        if self.is_rational():
            return CycNum(self.level, [1 / self.coords[0]])
        modulus = [Fraction(c) for c in cyclotomic_poly(self.level)]
        r0, r1 = modulus, _poly_trim(list(self.coords))
        s0, s1 = [], [Fraction(1)]
        # invariant: s_i * x == r_i  (mod Phi)
        while len(r1) > 1:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, _poly_trim(rem)
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        return CycNum(self.level, [a / c for a in s1])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def galois(self, k: int) -> CycNum:
        """Image under the automorphism zeta -> zeta**k (k coprime to l)."""
        if math.gcd(k, self.level) != 1:
            raise ValueError("k must be a unit mod l")
        gr = [Fraction(0)] * self.level
        for i, c in enumerate(self.coords):
            gr[(i * k) % self.level] += c
        return CycNum.from_group_ring(self.level, gr)

    def conjugate(self) -> CycNum:
        return self.galois(-1)

    def embed(self, digits: int = 15):
        """Complex value under zeta -> exp(2 pi i / l).

        Returns a Python complex for digits <= 15 and an mpmath.mpc beyond that.
        """
        if digits > 15:
            import mpmath

            with mpmath.workdps(digits + 5):
                w = mpmath.exp(2j * mpmath.pi / self.level)
                val = mpmath.fsum(
                    mpmath.mpf(c.numerator) / c.denominator * w**i
                    for i, c in enumerate(self.coords)
                )
                return val
        w = cmath.exp(2j * math.pi / self.level)
        return sum(float(c) * w**i for i, c in enumerate(self.coords))

    def __repr__(self):
        return f"CycNum({self.level}, {format_cyc(self)})"

    def to_json(self) -> dict:
        return {"level": self.level, "coords": [rational_to_str(c) for c in self.coords]}

    @classmethod
    def from_json(cls, data: dict) -> CycNum:
        return cls(data["level"], [rational_from_str(c) for c in data["coords"]])


def rational_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s: str) -> Fraction:
    return Fraction(s)


def format_cyc(x: CycNum, var: str = "w") -> str:
    """Human-readable power-basis notation, e.g. '1/2 - w + 3/2*w^2'."""
    terms = []
    for i, c in enumerate(x.coords):
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out
