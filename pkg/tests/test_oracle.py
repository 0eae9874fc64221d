"""Finite-difference oracle: assembly, Sturm counting, eigenvalues,
convergence order, and the two-sided Wronskian check."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwcross.errors import ConfigError
from dwcross.models import M1Params, M2Params, M3Params, M4Params, UnitsConfig
from dwcross.oracle import (
    OracleConfig,
    TridiagonalHamiltonian,
    _assemble,
    _grid_spec,
    build_hamiltonian,
    lowest_eigenvalues,
    oracle_levels,
    sturm_count,
    wronskian_constancy,
)
from dwcross.rootfind import RootfindConfig, solve_levels

U1 = UnitsConfig(1.0)


def tridiag(diag, off):
    return TridiagonalHamiltonian(
        diag=np.asarray(diag, dtype=float),
        offdiag=np.asarray(off, dtype=float),
        x_min=0.0,
        h=1.0,
        model_tag="test",
    )


class TestConfigValidation:
    def test_minimum_points(self):
        with pytest.raises(ConfigError):
            OracleConfig(n_points=400)

    def test_minimum_margin(self):
        with pytest.raises(ConfigError):
            OracleConfig(turning_point_margin=1.0)

    def test_model_defaults(self):
        cfg = OracleConfig()
        assert cfg.resolve_points(M1Params(0.0, 1.0, 1.0)) == 4000
        assert cfg.resolve_points(M3Params(0.0, 1.0, 1.0)) == 6000


class TestBuildHamiltonian:
    def test_box_domain_and_kinetic(self):
        m = M1Params(0.0, 2.0, 2.0)
        T = build_hamiltonian(m, U1, OracleConfig(n_points=1000))
        assert T.x_min == -2.0
        assert T.x_max == pytest.approx(2.0, abs=1e-12)
        kin = 1.0 / (U1.u * T.h * T.h)
        assert np.allclose(T.offdiag, -kin)
        assert np.allclose(T.diag, 2.0 * kin)

    def test_delta_spike_on_node(self):
        m = M1Params(10.0, 2.0, 2.0)
        T = build_hamiltonian(m, U1, OracleConfig(n_points=1000))
        i = T.delta_index
        assert i is not None
        x_delta = T.x_min + (i + 1) * T.h
        assert abs(x_delta) < T.h / 100.0  # snapped grid puts a node at 0
        assert T.diag[i] - T.diag[i + 1] == pytest.approx(10.0 / T.h, rel=1e-9)

    def test_m3_delta_node_exact(self):
        m = M3Params(5.0, 2.0, 1.3)
        T = build_hamiltonian(m, U1, OracleConfig(n_points=1000), e_top=12.0)
        x_delta = T.x_min + (T.delta_index + 1) * T.h
        assert x_delta == pytest.approx(0.0, abs=1e-12)

    def test_harmonic_walls_high_enough(self):
        m = M3Params(0.0, 2.0, 1.0)
        e_top = 9.0
        T = build_hamiltonian(m, U1, OracleConfig(n_points=800), e_top=e_top)
        for wall in (T.x_min, T.x_max):
            hw = m.hw1 if wall < 0 else m.hw2
            v_wall = 0.25 * U1.u * hw * hw * wall * wall
            assert v_wall >= 4.0 * e_top - 1e-9

    def test_delta_on_boundary_rejected(self):
        with pytest.raises(ConfigError, match="boundary"):
            build_hamiltonian(M1Params(5.0, 2.0, 1e-4), U1, OracleConfig(n_points=500))

    def test_offdiag_never_zero(self):
        # nonzero couplings make the discrete spectrum simple
        for m in (M1Params(10.0, 2.0, 2.0), M4Params(10.0, 2.0, 1.0, 0.5)):
            T = build_hamiltonian(m, U1, OracleConfig(n_points=600), e_top=15.0)
            assert np.all(T.offdiag != 0.0)


class TestSturmCount:
    def test_decoupled_two_by_two(self):
        T = tridiag([1.0, 2.0], [0.0])
        assert sturm_count(T, 1.5) == 1
        assert sturm_count(T, 0.5) == 0
        assert sturm_count(T, 2.5) == 2

    def test_coupled_two_by_two(self):
        # eigenvalues of [[2,-1],[-1,2]] are 1 and 3
        T = tridiag([2.0, 2.0], [-1.0])
        assert sturm_count(T, 0.9) == 0
        assert sturm_count(T, 1.1) == 1
        assert sturm_count(T, 3.1) == 2

    def test_against_dense_eigensolver(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(3, 30))
            diag = rng.normal(size=n) * 3.0
            off = rng.normal(size=n - 1) * 2.0
            dense = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
            eigs = np.linalg.eigvalsh(dense)
            T = tridiag(diag, off)
            for shift in rng.normal(size=8) * 4.0:
                assert sturm_count(T, float(shift)) == int(np.sum(eigs < shift))

    @given(st.integers(min_value=0, max_value=60))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_shift(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 25))
        T = tridiag(rng.normal(size=n), rng.normal(size=n - 1))
        shifts = np.sort(rng.normal(size=10) * 3.0)
        counts = [sturm_count(T, float(s)) for s in shifts]
        assert all(a <= b for a, b in zip(counts[:-1], counts[1:]))


class TestLowestEigenvalues:
    def test_known_three_by_three(self):
        T = tridiag([2.0, 2.0, 2.0], [-1.0, -1.0])
        got = lowest_eigenvalues(T, 3, tol=1e-12)
        want = [2.0 - math.sqrt(2.0), 2.0, 2.0 + math.sqrt(2.0)]
        assert np.allclose(got, want, atol=1e-11)

    def test_discrete_well_closed_form(self):
        # FD eigenvalues of the empty box are exactly
        # 2 (1 - cos(m pi / (N+1))) / (u h^2)
        m = M1Params(0.0, 2.0, 2.0)
        T = build_hamiltonian(m, U1, OracleConfig(n_points=500))
        n_tot = T.size
        got = lowest_eigenvalues(T, 4, tol=1e-12)
        kin = 1.0 / (U1.u * T.h * T.h)
        want = [2.0 * kin * (1.0 - math.cos(j * math.pi / (n_tot + 1))) for j in (1, 2, 3, 4)]
        assert np.allclose(got, want, rtol=1e-12, atol=1e-11)

    def test_argument_validation(self):
        T = tridiag([1.0, 2.0], [0.5])
        with pytest.raises(ValueError):
            lowest_eigenvalues(T, 3)
        with pytest.raises(ValueError):
            lowest_eigenvalues(T, 1, tol=-1.0)

    def test_strictly_increasing(self):
        m = M2Params(10.0, 2.0, 1.0, 2.0)  # symmetric: tight doublets
        T = build_hamiltonian(m, U1, OracleConfig(n_points=2000))
        levels = lowest_eigenvalues(T, 6, tol=1e-11)
        diffs = np.diff(levels)
        assert np.all(diffs > 1e-9)


class TestOracleLevels:
    def test_infinite_well_with_richardson(self):
        got = oracle_levels(M1Params(0.0, 2.0, 2.0), U1, 1, OracleConfig())
        assert got[0] == pytest.approx((math.pi / 4.0) ** 2, abs=1e-7)

    def test_harmonic_ground_state(self):
        got = oracle_levels(M3Params(0.0, 2.0, 2.0), U1, 1, OracleConfig(n_points=2000), e_top=9.0)
        assert got[0] == pytest.approx(1.0, abs=1e-6)

    def test_delta_immune_odd_level(self):
        got = oracle_levels(M3Params(10.0, 2.0, 2.0), U1, 2, OracleConfig(n_points=3000))
        assert got[1] == pytest.approx(3.0, abs=1e-4)
        assert got[0] > 1.0

    def test_richardson_beats_single_grid(self):
        exact = (math.pi / 4.0) ** 2
        m = M1Params(0.0, 2.0, 2.0)
        plain = oracle_levels(m, U1, 1, OracleConfig(n_points=1000, richardson=False))
        extrap = oracle_levels(m, U1, 1, OracleConfig(n_points=1000, richardson=True))
        assert abs(extrap[0] - exact) < 0.01 * abs(plain[0] - exact)

    def test_domain_doubling_invariance(self):
        # wall truncation error is exponentially small: doubling the
        # turning-point margin must not move the levels
        m = M4Params(10.0, 2.0, 1.0, 0.5)
        tight = oracle_levels(m, U1, 3, OracleConfig(n_points=4000, turning_point_margin=2.0))
        wide = oracle_levels(m, U1, 3, OracleConfig(n_points=8000, turning_point_margin=4.0))
        assert np.allclose(tight, wide, atol=5e-6)

    @pytest.mark.parametrize(
        "model,u,tol",
        [
            (M1Params(10.0, 2.0, 2.0), 1.0, 2e-3),
            (M1Params(10.0, 2.0, 3.7), 1.0, 2e-3),
            (M1Params(20.0, 5.0, 5.0), 0.2625, 2e-3),
            (M2Params(10.0, 2.0, 1.0, 3.0), 1.0, 2e-3),
            (M3Params(10.0, 2.0, 1.5), 1.0, 5e-3),
            (M4Params(10.0, 2.0, 2.0, 1.0), 1.0, 5e-3),
        ],
    )
    def test_agreement_with_analytic_roots(self, model, u, tol):
        units = UnitsConfig(u)
        analytic = solve_levels(model, units, 4)
        reference = oracle_levels(model, units, 4, OracleConfig(), e_top=1.5 * analytic[-1])
        assert np.allclose(analytic, reference, atol=tol)

    def test_electron_mass_units_low_doublet(self):
        # wide symmetric delta-in-box at mu = m_e: the lowest tunneling
        # doublet sits well under 5 eV
        units = UnitsConfig(0.2625)
        levels = solve_levels(M1Params(20.0, 5.0, 5.0), units, 2)
        assert levels[1] < 5.0
        assert levels[1] - levels[0] < 0.5


class TestConvergenceOrder:
    @pytest.mark.parametrize(
        "model,exact,e_top",
        [
            (M1Params(0.0, 2.0, 2.0), [(n * math.pi / 4.0) ** 2 for n in (1, 2, 3)], 8.0),
            (M3Params(0.0, 2.0, 2.0), [1.0, 3.0, 5.0], 9.0),
        ],
    )
    def test_error_quarters_when_h_halves(self, model, exact, e_top):
        cfg = OracleConfig(n_points=1500, richardson=False)
        spec = _grid_spec(model, U1, cfg, e_top)
        coarse = lowest_eigenvalues(_assemble(model, U1, spec), 3, tol=1e-12)
        fine = lowest_eigenvalues(_assemble(model, U1, spec.refined()), 3, tol=1e-12)
        for c, f, x in zip(coarse, fine, exact):
            ratio = abs(c - x) / abs(f - x)
            assert 3.5 <= ratio <= 4.5


class TestWronskianConstancy:
    def test_exact_box_eigenvalue(self):
        m = M1Params(0.0, 2.0, 2.0)
        r = wronskian_constancy(m, U1, (math.pi / 4.0) ** 2, OracleConfig())
        assert r <= 1e-6

    def test_non_eigenvalue_is_order_one(self):
        m = M1Params(0.0, 2.0, 2.0)
        assert wronskian_constancy(m, U1, 0.9, OracleConfig()) >= 0.1

    def test_delta_immune_level(self):
        m = M3Params(10.0, 2.0, 2.0)
        assert wronskian_constancy(m, U1, 3.0, OracleConfig()) <= 1e-5

    @pytest.mark.parametrize(
        "model",
        [
            M1Params(10.0, 2.0, 2.0),
            M2Params(10.0, 2.0, 1.0, 3.0),
            M3Params(10.0, 2.0, 1.5),
            M4Params(10.0, 2.0, 2.0, 1.0),
        ],
    )
    def test_discriminates_eigen_from_non(self, model):
        tight = RootfindConfig(tol_abs=1e-13)
        levels = solve_levels(model, U1, 2, tight)
        for e in levels:
            assert wronskian_constancy(model, U1, e, OracleConfig()) <= 1e-5
        probe = 0.5 * (levels[0] + levels[1])
        assert wronskian_constancy(model, U1, probe, OracleConfig()) >= 0.05
