from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricforms.hecke import (
    MerelMatrix,
    apply_hecke,
    hecke_matrix,
    hecke_span,
    hecke_symbol,
    merel_matrices,
    sturm_bound,
)
from toricforms.linalg import Mat
from toricforms.manin import (
    build_space,
    canonical,
    dual_basis,
    dual_from_coords,
    iota,
    pairing,
    sym_plus,
    winding,
)


def brute_merel(n):
    out = set()
    for a in range(1, n + 2):
        for b in range(a):
            for c in range(0, n + 1):
                for d in range(c + 1, n + 2):
                    if a * d - b * c == n:
                        out.add((a, b, c, d))
    return out


def test_merel_examples():
    assert merel_matrices(1) == (MerelMatrix(1, 0, 0, 1),)
    assert {(g.a, g.b, g.c, g.d) for g in merel_matrices(2)} == {(1, 0, 0, 2), (1, 0, 1, 2), (2, 0, 0, 1), (2, 1, 0, 1)}
    assert len(merel_matrices(3)) == 7
    with pytest.raises(ValueError):
        merel_matrices(0)


@pytest.mark.parametrize("n", range(1, 25))
def test_merel_matches_brute_force(n):
    got = [(g.a, g.b, g.c, g.d) for g in merel_matrices(n)]
    assert len(got) == len(set(got))
    assert set(got) == brute_merel(n)
    assert all(g.det == n for g in merel_matrices(n))


def test_hecke_symbol_examples():
    assert hecke_symbol(1, (2, 3), 7) == {(2, 3): 1}
    l = 5
    assert hecke_symbol(2, (0, 1), l) == {canonical(0, 2, l): 1, canonical(1, 2, l): 1, canonical(0, 1, l): 2}
    assert hecke_symbol(2, (1, 1), 6) == {canonical(1, 2, 6): 1, canonical(2, 1, 6): 1}


@pytest.mark.parametrize("kind", ["M", "M+", "M-", "S", "S+", "S-"])
def test_t1_is_identity(kind):
    sp = build_space(13, kind)
    assert hecke_matrix(1, sp).mat == Mat.identity(sp.dim)


def test_t2_on_level_11_cusp_forms():
    assert hecke_matrix(2, build_space(11, "S+")).mat == Mat([[-2]])
    assert hecke_matrix(2, build_space(11, "S-")).mat == Mat([[-2]])


@pytest.mark.parametrize("l", [7, 11])
@pytest.mark.parametrize("m,n", [(2, 3), (2, 5), (3, 4)])
def test_multiplicativity(l, m, n):
    sp = build_space(l, "M")
    tm, tn, tmn = (hecke_matrix(k, sp).mat for k in (m, n, m * n))
    assert tm @ tn == tmn
    assert tn @ tm == tmn


@pytest.mark.parametrize("l", [11, 12, 13, 15])
def test_commutes_with_iota(l):
    sp = build_space(l, "M")
    for n in (2, 3, 5, 7):
        if l % n == 0:
            continue
        for v in sp.basis():
            assert iota(apply_hecke(n, v)) == apply_hecke(n, iota(v))


@pytest.mark.parametrize("l", [7, 11, 13])
def test_duality_preserves_constraints(l):
    sp = build_space(l, "M")
    for n in range(1, 13):
        t = hecke_matrix(n, sp).mat
        for phi_coords in Mat.identity(sp.dim).data:
            img = t.T.apply(phi_coords)  # coordinates of phi o T_n
            psi = dual_from_coords(sp, img)
            assert psi.check_constraints()
            phi = dual_from_coords(sp, phi_coords)
            for x in sp.symbols[:20]:
                lhs = sum((c * pairing(phi, y) for y, c in hecke_symbol(n, x, l).items()), Fraction(0))
                assert pairing(psi, x) == lhs


@pytest.mark.parametrize("l", [11, 13, 16])
def test_cuspidal_spaces_are_stable(l):
    for kind in ("S", "S+", "S-"):
        sp = build_space(l, kind)
        for n in (2, 3, 5):
            # hecke_matrix raises if an image leaves the kernel of the boundary
            op = hecke_matrix(n, sp)
            for v in sp.basis():
                img = sp.to_parent(op(v))
                assert not any(sp.parent.boundary(img))


def test_hecke_span_examples():
    m5 = build_space(5, "M")
    assert hecke_span(m5.zero()).dim == 0
    assert hecke_span(winding(m5)).dim <= 3
    mp = build_space(11, "M+")
    span = hecke_span(winding(mp))
    assert span.stabilized and span.last_n >= sturm_bound(11)


def test_sturm_bound_values():
    assert [sturm_bound(l) for l in (2, 5, 11, 17, 25)] == [1, 4, 20, 48, 100]


@settings(max_examples=50)
@given(st.sampled_from([7, 9, 11, 13]), st.integers(2, 12), st.data())
def test_hecke_on_plus_space_matches_symmetrization(l, n, data):
    m = build_space(l, "M")
    mp = build_space(l, "M+")
    i = data.draw(st.integers(0, m.dim - 1))
    v = m.basis()[i]
    # T_n((u,v)_+) = (T_n(u,v))_+ read in M+
    from toricforms.manin import to_signed

    assert to_signed(apply_hecke(n, v), 1) == apply_hecke(n, to_signed(v, 1))
