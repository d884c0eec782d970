"""Acceptance criteria 1-10, each with its exactness or tolerance and its runtime limit.

Every test prints one PASS/FAIL line, repeated in the terminal summary.
"""

import os
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import CRITERIA
from toricforms.hecke import sturm_bound
from toricforms.linalg import Echelon
from toricforms.lvalues import nonvanishing_count
from toricforms.manin import build_space, dual_basis, pi_map
from toricforms.qseries import s2_series, s_series, s_sq_plus_s2_series, theta_numeric
from toricforms.toric import eisenstein_codimension, hecke_toric_check, keytheorem_defect, rank_zero_dims

N = 40
THETA_TOL = 1e-8
L_TOL = 1e-6


@contextmanager
def criterion(number: int, title: str, limit_s: float):
    t0 = time.perf_counter()
    state = {"ok": False}
    try:
        yield state
    finally:
        dt = time.perf_counter() - t0
        ok = state["ok"] and dt < limit_s
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  ({dt:.1f} s, limit {limit_s:.0f} s)"
        CRITERIA[number] = line
        print(line)
    assert dt < limit_s, f"criterion {number} took {dt:.1f} s, limit {limit_s} s"


def test_criterion_01_small_levels_vanish():
    with criterion(1, "toricDim = windingDim = 0 for l = 2..10, 12", 30) as st:
        dims = {l: rank_zero_dims(l) for l in [*range(2, 11), 12]}
        bad = {l: (r.toric_dim, r.winding_dim) for l, r in dims.items() if r.toric_dim or r.winding_dim}
        assert not bad, bad
        st["ok"] = True


def test_criterion_02_relation_identity():
    with criterion(2, "three-term product relation exact, l = 7, 11, 13, N = 40", 60) as st:
        for l in (7, 11, 13):
            s = {a: s_series(a, l, N) for a in range(1, l)}
            s2 = {a: s2_series(a, l, N) for a in range(1, l)}
            for a in range(1, l):
                for b in range(1, l):
                    c = (-a - b) % l
                    if c == 0:
                        continue
                    lhs = s[a] * s[b] + s[b] * s[c] + s[c] * s[a]
                    rhs = (s[a] * s[a] + s[b] * s[b] + s[c] * s[c] + s2[a] + s2[b] + s2[c]).scale(Fraction(-1, 2))
                    assert lhs == rhs, (l, a, b, c)
        st["ok"] = True


def test_criterion_03_square_plus_s2():
    with criterion(3, "s^2 + s2 closed form exact, l = 5, 7, 11, N = 40", 30) as st:
        for l in (5, 7, 11):
            for a in range(1, l):
                s = s_series(a, l, N)
                assert s * s + s2_series(a, l, N) == s_sq_plus_s2_series(a, l, N), (l, a)
        st["ok"] = True


def test_criterion_04_keytheorem():
    with criterion(4, "rho1 - rho - discrepancy = 0 in q^1..q^39, l = 7, 11, 13, 14", 300) as st:
        for l in (7, 11, 13, 14):
            for i, phi in enumerate(dual_basis(build_space(l, "M+"))):
                defect = keytheorem_defect(phi, N)
                assert len(defect) == N - 1
                assert not any(defect), (l, i)
        st["ok"] = True


def test_criterion_05_hecke_equivariance():
    with criterion(5, "Hecke equivariance on all (m, n), l = 11, 13, p = 2, 3, Sturm precision", 600) as st:
        for l in (11, 13):
            for p in (2, 3):
                for m in range(l):
                    for n in range(l):
                        r = hecke_toric_check(m, n, l, p, prec=sturm_bound(l))
                        # symbol route and superlattice route are compared separately
                        assert r.symbol_side == r.merel_side, (l, p, m, n, "symbols")
                        assert r.superlattice_side == r.merel_side, (l, p, m, n, "superlattices")
                        assert r.ok
        st["ok"] = True


SPOT = {11: 1, 13: 2, 14: 1, 15: 1, 16: 2, 17: 5}


def test_criterion_06_main_theorem():
    with criterion(6, "toricDim = windingDim = L-oracle count, l = 11, 13, 14, 15, 16, 17", 1800) as st:
        for l, want in SPOT.items():
            rep = rank_zero_dims(l)
            assert rep.toric_dim == want, (l, "toric", rep.toric_dim)
            assert rep.winding_dim == want, (l, "winding", rep.winding_dim)
            assert nonvanishing_count(l, tol=L_TOL) == want, (l, "L-oracle")
        st["ok"] = True


def test_criterion_07_level_25_codimension():
    with criterion(7, "dim E(25) - dim(E(25) meet toric span) = 1", 900) as st:
        res = eisenstein_codimension(25)
        assert res["codimension"] == 1, res
        st["ok"] = True


def test_criterion_08_theta_oracle():
    tau = 0.05 + 0.9j
    with criterion(8, "s_series vs triple product at tau = 0.05 + 0.9i within 1e-8, l = 5, 7", 10) as st:
        for l in (5, 7):
            for a in range(1, l):
                err = abs(s_series(a, l, N).evaluate(tau) - theta_numeric(a / l, tau))
                assert err < THETA_TOL, (l, a, err)
        st["ok"] = True


def test_criterion_09_pi_map_spans_s_minus():
    with criterion(9, "pi_map of a dual basis of M+ spans S-, l = 11, 13, 17", 120) as st:
        for l in (11, 13, 17):
            target = build_space(l, "S-")
            ech = Echelon(target.dim)
            for phi in dual_basis(build_space(l, "M+")):
                ech.add(list(pi_map(phi).coords))
            assert ech.rank == target.dim, (l, ech.rank, target.dim)
        st["ok"] = True


INVARIANT_MODULES = ["test_field.py", "test_linalg.py", "test_manin.py", "test_hecke.py", "test_qseries.py"]


@pytest.mark.skipif(os.environ.get("TORICFORMS_NESTED") == "1", reason="already inside the invariants run")
def test_criterion_10_structural_invariants():
    here = Path(__file__).parent
    with criterion(10, "structural invariants of field, linalg, manin, hecke, qseries", 300) as st:
        env = {**os.environ, "TORICFORMS_NESTED": "1", "HYPOTHESIS_PROFILE": "ci"}
        proc = subprocess.run(
            [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *[str(here / m) for m in INVARIANT_MODULES]],
            capture_output=True,
            text=True,
            env=env,
            cwd=here.parent,
        )
        assert proc.returncode == 0, proc.stdout[-3000:]
        st["ok"] = True
