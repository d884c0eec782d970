import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricforms.field import CycNum
from toricforms.hecke import sturm_bound
from toricforms.manin import build_space
from toricforms.qseries import (
    EisBasis,
    QExpansion,
    default_precision,
    e2_level_family,
    e2_series,
    eisenstein_basis,
    eisenstein_dimension,
    eisenstein_generators,
    orbit_eisenstein_series,
    reduce_mod_eis,
    s2_series,
    s_series,
    s_sq_plus_s2_series,
    sigma1,
    theta_numeric,
    tilde_s_coeffs,
    tilde_s_series,
)

from strategies import cyc_numbers

N = 40


def w(l, k=1):
    return CycNum.zeta(l, k)


def q_power(l, n, prec):
    return QExpansion.from_coeffs(l, [1 if i == n else 0 for i in range(prec)])


# -- arithmetic


def test_product_examples():
    l, prec = 5, 8
    f = s_series(1, l, prec)
    assert f * QExpansion.one(l, prec) == f
    assert q_power(l, 1, prec) * q_power(l, 1, prec) == q_power(l, 2, prec)
    one_plus = QExpansion.one(l, prec) + q_power(l, 1, prec)
    one_minus = QExpansion.one(l, prec) - q_power(l, 1, prec)
    assert one_plus * one_minus == QExpansion.one(l, prec) - q_power(l, 2, prec)
    assert q_power(l, 5, prec) * q_power(l, 5, prec) == QExpansion.zero(l, prec)


def test_tag_mismatch():
    with pytest.raises(ValueError):
        s_series(1, 5, 10) + s_series(1, 7, 10)
    with pytest.raises(ValueError):
        s_series(1, 5, 10) * s_series(1, 5, 11)
    with pytest.raises(ValueError):
        eisenstein_basis(5, 10).contains(s_series(1, 5, 11))


def series_strategy(level, prec):
    return st.lists(cyc_numbers(level), min_size=prec, max_size=prec).map(lambda c: QExpansion.from_coeffs(level, c))


@settings(max_examples=60)
@given(series_strategy(5, 6), series_strategy(5, 6), series_strategy(5, 6))
def test_ring_axioms(f, g, h):
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f - f).is_zero()


@settings(max_examples=60)
@given(series_strategy(7, 9), series_strategy(7, 9), st.integers(1, 4))
def test_lift_is_a_ring_map(f, g, t):
    assert (f * g).lift(t) == f.lift(t) * g.lift(t)
    assert (f + g).lift(t) == f.lift(t) + g.lift(t)


@settings(max_examples=60)
@given(series_strategy(12, 7), st.integers(0, 6))
def test_coefficientwise_product_oracle(f, n):
    g = s_series(1, 12, 7)
    want = sum((f.coeff(i) * g.coeff(n - i) for i in range(n + 1)), CycNum.zero(12))
    assert (f * g).coeff(n) == want


def test_json_round_trip():
    f = s_series(2, 7, 12) * s_series(3, 7, 12)
    assert QExpansion.from_json(f.to_json()) == f


# -- explicit series


@pytest.mark.parametrize("l", [5, 7, 12])
def test_s_series_examples(l):
    for a in range(1, l):
        f = s_series(a, l, N)
        wa = w(l, a)
        assert f.constant == (wa + 1) / ((wa - 1) * 2)
        assert f.coeff(1) == -(wa - w(l, -a))
        assert s_series(l - a, l, N) == -f
        d = 12
        assert f.coeff(d) == -sum((w(l, k * a) - w(l, -k * a) for k in (1, 2, 3, 4, 6, 12)), CycNum.zero(l))
    with pytest.raises(ValueError):
        s_series(l, l, N)


@pytest.mark.parametrize("l", [5, 7, 12])
def test_s2_series_examples(l):
    for a in range(1, l):
        f = s2_series(a, l, N)
        wa = w(l, a)
        assert f.coeff(1) == -(wa + w(l, -a) - 2)
        assert s2_series(l - a, l, N) == f
        assert f.constant == -wa / ((wa - 1) * (wa - 1)) - Fraction(1, 12)
        expected = (3 / math.sin(math.pi * a / l) ** 2 - 1) / 12
        assert abs(f.constant.embed() - expected) < 1e-12
    with pytest.raises(ValueError):
        s2_series(0, l, N)


def test_printed_constant_breaks_the_closed_form():
    # with +w^a/(w^a-1)^2 - 1/12 as constant term, s^2 + s2 would not have constant 1/6
    l, a = 7, 1
    wa = w(l, a)
    s = s_series(a, l, N)
    alt_const = wa / ((wa - 1) * (wa - 1)) - Fraction(1, 12)
    assert (s * s).constant + alt_const != Fraction(1, 6)
    assert (s * s).constant + s2_series(a, l, N).constant == Fraction(1, 6)


@pytest.mark.parametrize("l", [5, 7, 11])
def test_square_plus_s2_closed_form(l):
    for a in range(1, l):
        g = s_sq_plus_s2_series(a, l, N)
        assert g.constant == Fraction(1, 6)
        assert g.coeff(1) == -(w(l, a) + w(l, -a)) * 2
        s = s_series(a, l, N)
        assert s * s + s2_series(a, l, N) == g


def test_tilde_examples():
    assert tilde_s_series(0, 5, N).is_zero()
    for l in (5, 7, 11):
        for a in range(1, l):
            assert tilde_s_series(a, l, N).constant == Fraction(a, l) - Fraction(1, 2)
    assert tilde_s_coeffs(1, 5, N)[1] == -1
    assert tilde_s_coeffs(4, 5, N)[1] == 1


@settings(max_examples=100)
@given(st.integers(2, 30), st.data())
def test_tilde_antisymmetry(l, data):
    a = data.draw(st.integers(1, l - 1))
    assert tilde_s_series(l - a, l, 25) == -tilde_s_series(a, l, 25)


def test_e2_examples():
    e2 = e2_series(N)
    assert e2.coeff(1) == -24
    assert e2.coeff(4) == -24 * 7
    fam = e2_level_family(6, N)
    assert len(fam) == 3
    assert fam[0].constant == -1
    assert [sigma1(n) for n in (1, 6, 12, 28)] == [1, 12, 28, 56]


# -- Eisenstein space


@pytest.mark.parametrize("l,rank", [(5, 3), (7, 5), (11, 9)])
def test_eisenstein_rank_examples(l, rank):
    b = eisenstein_basis(l, N)
    assert b.rank == rank
    assert build_space(l, "M").dim - build_space(l, "S").dim == rank


@pytest.mark.parametrize("l", range(2, 26))
def test_eisenstein_rank_equals_cusp_count(l):
    prec = default_precision(l)
    b = eisenstein_basis(l, prec)
    assert b.rank == b.expected == eisenstein_dimension(l)
    if b.supplemented:
        # orbit sums must not add anything beyond E(l) at a larger precision
        big = EisBasis(l, 2 * prec)
        assert big.rank == b.expected


@pytest.mark.parametrize("l", [5, 7, 11, 13])
def test_orbit_sums_lie_in_toric_family(l):
    # prime levels: the toric family alone spans E(l); orbit sums are an independent construction
    prec = default_precision(l)
    toric_only = EisBasis(l, prec, generators=eisenstein_generators(l, prec))
    assert toric_only.rank == eisenstein_dimension(l)
    for v1 in range(1, l):
        assert toric_only.contains(orbit_eisenstein_series(v1, 0, l, prec))


def test_constant_is_not_eisenstein():
    b = eisenstein_basis(5, N)
    assert b.with_constants().rank == b.rank + 1
    assert not b.contains(QExpansion.one(5, N))


@pytest.mark.parametrize("l", [5, 7, 11, 12])
def test_basis_self_consistency(l):
    b = eisenstein_basis(l, N)
    for f in eisenstein_generators(l, N):
        assert all(x.is_zero() for x in reduce_mod_eis(f, b))
    for a in range(1, l):
        assert b.contains(s2_series(a, l, N))
        s = s_series(a, l, N)
        assert b.contains(s * s)


@pytest.mark.parametrize("l", [11, 13])
def test_cusp_form_survives_reduction(l):
    b = eisenstein_basis(l, N)
    s = {a: s_series(a, l, N) for a in range(1, l)}
    assert any(not b.contains(s[a] * s[c]) for a in range(1, l) for c in range(a, l))


@pytest.mark.parametrize("l", [5, 7, 12])
def test_divisor_sum_series_are_eisenstein_up_to_constants(l):
    gens = [QExpansion.one(l, N), e2_series(N, l)]
    for a in range(1, l):
        gens += [s2_series(a, l, N), s_sq_plus_s2_series(a, l, N)]
    span = EisBasis(l, N, generators=gens)
    for a in range(1, l):
        f1 = [CycNum.zero(l)] * N
        f2 = [CycNum.zero(l)] * N
        for d in range(1, N):
            for k in range(1, d + 1):
                if d % k == 0:
                    t = w(l, a * k) + w(l, -a * k)
                    f1[d] = f1[d] + t * k
                    f2[d] = f2[d] + t * (d // k)
        assert span.contains(QExpansion.from_coeffs(l, f1))
        assert span.contains(QExpansion.from_coeffs(l, f2))


def test_default_precision_exceeds_sturm_bound():
    for l in range(2, 30):
        assert default_precision(l) > sturm_bound(l)
        index = l * l
        for p in {p for p in range(2, l + 1) if l % p == 0 and all(p % r for r in range(2, p))}:
            index = index * (p * p - 1) // (p * p)
        if l > 2:
            # index of Gamma_1(l) in SL_2(Z) over 6, twice the projective weight-two bound
            assert sturm_bound(l) == math.ceil(Fraction(index, 6))


# -- theta oracle

TAU = 0.05 + 0.9j


@pytest.mark.parametrize("l", [5, 7])
def test_theta_agrees_with_series(l):
    for a in range(1, l):
        val = s_series(a, l, N).evaluate(TAU)
        assert abs(val - theta_numeric(a / l, TAU)) < 1e-8


def test_theta_examples():
    for z in (0.1, 0.23, 0.4):
        assert abs(theta_numeric(z, TAU) + theta_numeric(1 - z, TAU)) < 1e-9
    assert abs(theta_numeric(0.5, 1.3j)) < 1e-12
    with pytest.raises(ValueError):
        theta_numeric(0.3, 0.5 - 0.1j)
    with pytest.raises(ArithmeticError):
        theta_numeric(0.3, 0.5 + 1e-6j, max_terms=10)


def test_theta_cot_limit():
    # as Im tau -> infinity only the leading term survives: (x+1)/(2(x-1)) = -(i/2) cot(pi z)
    z = 0.3
    assert abs(theta_numeric(z, 40j) - (-0.5j / math.tan(math.pi * z))) < 1e-12
