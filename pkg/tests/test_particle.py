"""Truncated Fock representations: matrices, projectors, bracket checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrsym import (
    GlobalUnits,
    RepConfig,
    build_particle_rep,
    build_zeta_rep,
    interior_projector,
    rep_config_from_json,
    verify_homomorphism,
)
from hrsym.dynamics import evolve_observable


def norm2(m):
    return np.linalg.norm(m, 2)


class TestConfig:
    def test_zero_mass_rejected(self):
        with pytest.raises(ValueError, match="central charge"):
            RepConfig(mass=0.0)

    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError):
            RepConfig(mass=-1.0)

    def test_spin_requires_three_dimensions(self):
        with pytest.raises(ValueError):
            RepConfig(mass=1.0, dims=2, spin=0.5)

    def test_spin_must_be_half_integer(self):
        with pytest.raises(ValueError):
            RepConfig(mass=1.0, dims=3, spin=0.3)

    def test_json_round_trip(self):
        cfg = rep_config_from_json(
            {"mass": 2.0, "dims": 3, "levels": 4, "spin": 0.5, "hbar": 2.0, "omega_ref": 0.5}
        )
        assert cfg.dim == 4**3 * 2
        assert cfg.units == GlobalUnits(hbar=2.0, omega_ref=0.5)


class TestLadderMatrices:
    def test_two_level_matrices_literal(self):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=1, levels=2))
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        assert np.allclose(rep.X[0], inv_sqrt2 * np.array([[0, 1], [1, 0]]), atol=1e-15)
        assert np.allclose(rep.P[0], 1j * inv_sqrt2 * np.array([[0, -1], [1, 0]]), atol=1e-15)

    def test_mass_matrix_is_exact_scalar(self):
        for mass in (0.25, 1.0, 7.5):
            rep = build_particle_rep(RepConfig(mass=mass, dims=1, levels=5))
            assert np.array_equal(rep.M, mass * np.eye(5))
            assert np.array_equal(rep.K[0], mass * rep.X[0])

    def test_truncated_commutator_defect_sits_at_top_level(self):
        # oracle: [a, a+] truncated = Id - N |N-1><N-1|
        n = 8
        rep = build_particle_rep(RepConfig(mass=1.0, dims=1, levels=n))
        comm = rep.X[0] @ rep.P[0] - rep.P[0] @ rep.X[0]
        top = np.zeros((n, n))
        top[n - 1, n - 1] = 1.0
        assert np.max(np.abs(comm - 1j * (np.eye(n) - n * top))) < 1e-12

    def test_all_generators_hermitian(self):
        rep = build_particle_rep(RepConfig(mass=1.3, dims=3, levels=3, spin=0.5))
        for op in [*rep.X, *rep.P, *rep.K, rep.M, *rep.J.values()]:
            assert np.max(np.abs(op - op.conj().T)) <= 1e-15

    def test_scale_follows_units(self):
        units = GlobalUnits(hbar=3.0, omega_ref=2.0)
        rep = build_particle_rep(RepConfig(mass=5.0, dims=1, levels=4, units=units))
        a = np.diag(np.sqrt(np.arange(1.0, 4)), 1)
        expected = np.sqrt(3.0 / (2 * 5.0 * 2.0)) * (a + a.T)
        assert np.allclose(rep.X[0], expected, atol=1e-15)


class TestInteriorProjector:
    def test_zero_margin_is_identity(self):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=1, levels=6))
        proj = interior_projector(rep, 0)
        assert proj.rank == 6
        assert np.array_equal(proj.matrix, np.eye(6))

    def test_rank_counts(self):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=1, levels=8))
        assert interior_projector(rep, 1).rank == 7
        rep2 = build_particle_rep(RepConfig(mass=1.0, dims=2, levels=4))
        assert interior_projector(rep2, 2).rank == 4

    def test_projector_idempotent_hermitian(self):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=2, levels=4))
        p = interior_projector(rep, 1).matrix
        assert np.array_equal(p, p @ p)
        assert np.array_equal(p, p.conj().T)

    def test_margin_out_of_range(self):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=1, levels=4))
        with pytest.raises(ValueError):
            interior_projector(rep, 4)


class TestHomomorphism:
    def test_three_dimensional_rep_passes_at_tolerance(self):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=3, levels=6))
        report = verify_homomorphism(rep, "hr3", margin=2, tol=1e-10)
        assert report.passed
        assert len(report.checks) == 45

    def test_unprojected_boundary_defect_magnitude(self):
        # oracle: raw [K, P] defect norm is m * N * hbar on the top level
        n = 8
        rep = build_particle_rep(RepConfig(mass=1.0, dims=1, levels=n))
        report = verify_homomorphism(rep, "h3", margin=0, tol=1e-10)
        assert not report.passed
        defect = report["[K1,P1]"].metrics["defect_norm"]
        assert abs(defect - n * 1.0) < 1e-9

    def test_mass_rows_exact_at_any_margin(self):
        rep = build_particle_rep(RepConfig(mass=2.0, dims=1, levels=8))
        report = verify_homomorphism(rep, "h3", margin=0, tol=1e-10)
        assert report["[K1,M]"].metrics["defect_norm"] == 0.0
        assert report["[P1,M]"].metrics["defect_norm"] == 0.0

    def test_projected_ccr_with_margin_one(self):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=2, levels=6))
        hbar = 1.0
        idx = rep.interior_indices(1)
        for i in range(2):
            for j in range(2):
                comm = rep.X[i] @ rep.P[j] - rep.P[j] @ rep.X[i]
                want = 1j * hbar * (i == j) * np.eye(len(idx))
                assert norm2(comm[np.ix_(idx, idx)] - want) <= 1e-12

    def test_spinful_rep_satisfies_rotation_brackets(self):
        rep = build_particle_rep(RepConfig(mass=2.0, dims=3, levels=3, spin=1.0))
        report = verify_homomorphism(rep, "hr3", margin=1, tol=1e-10)
        assert report.passed


class TestZetaFamily:
    def test_unit_zeta_is_plain_rep(self):
        cfg = RepConfig(mass=1.0, dims=1, levels=6)
        z = build_zeta_rep(1.0, cfg)
        rep = build_particle_rep(cfg)
        assert np.array_equal(z.X[0], rep.X[0])
        assert np.array_equal(z.P[0], rep.P[0])
        assert np.array_equal(z.I, np.eye(6))

    def test_zero_zeta_rejected(self):
        with pytest.raises(ValueError, match="zeta"):
            build_zeta_rep(0.0, RepConfig(mass=1.0, dims=1, levels=4))

    def test_scaled_commutator_on_interior(self):
        cfg = RepConfig(mass=1.0, dims=1, levels=8)
        z = build_zeta_rep(4.0, cfg)
        rep = build_particle_rep(cfg)
        idx = rep.interior_indices(1)
        comm = z.X[0] @ z.P[0] - z.P[0] @ z.X[0]
        assert norm2(comm[np.ix_(idx, idx)] - 4j * np.eye(len(idx))) <= 1e-12

    @settings(max_examples=20, deadline=None)
    @given(zeta=st.floats(-10, 10).filter(lambda z: abs(z) > 1e-3))
    def test_commutator_tracks_zeta(self, zeta):
        cfg = RepConfig(mass=1.0, dims=1, levels=8)
        z = build_zeta_rep(zeta, cfg)
        rep = build_particle_rep(cfg)
        idx = rep.interior_indices(1)
        comm = z.X[0] @ z.P[0] - z.P[0] @ z.X[0]
        assert norm2(comm[np.ix_(idx, idx)] - 1j * zeta * np.eye(len(idx))) <= 1e-10

    def test_central_charge_eigenvalue_distinguishes_members(self):
        # the central matrices of distinct zeta values differ, so the family
        # members are inequivalent representations
        cfg = RepConfig(mass=1.0, dims=1, levels=4)
        z1 = build_zeta_rep(1.0, cfg)
        z2 = build_zeta_rep(2.5, cfg)
        assert np.max(np.abs(z1.I - z2.I)) > 1.0


class TestFlowCovariance:
    def test_boost_shifts_conjugate_momentum_on_interior(self):
        # exp(i b K / hb) P exp(-i b K / hb) = P - m b Id away from the boundary
        rep = build_particle_rep(RepConfig(mass=1.5, dims=2, levels=24))
        b = 0.15
        shifted = evolve_observable(rep.K[0], rep.P[0], b)
        idx = rep.interior_indices(8)
        want = (rep.P[0] - 1.5 * b * np.eye(rep.dim))[np.ix_(idx, idx)]
        assert norm2(shifted[np.ix_(idx, idx)] - want) <= 1e-6

    def test_boost_leaves_transverse_momentum_exactly(self):
        rep = build_particle_rep(RepConfig(mass=1.5, dims=2, levels=24))
        shifted = evolve_observable(rep.K[0], rep.P[1], 0.15)
        assert np.max(np.abs(shifted - rep.P[1])) <= 1e-12

    def test_boost_generators_commute_exactly(self):
        rep = build_particle_rep(RepConfig(mass=2.0, dims=3, levels=3))
        for i in range(3):
            for j in range(3):
                assert np.max(np.abs(rep.K[i] @ rep.K[j] - rep.K[j] @ rep.K[i])) == 0.0

    def test_rotation_covariance_quarter_turn(self):
        # exp(i th J12 / hb) K1 exp(-i th J12 / hb) = cos(th) K1 - sin(th) K2,
        # exact on the interior because J12 conserves total quanta
        rep = build_particle_rep(RepConfig(mass=1.0, dims=3, levels=6))
        theta = np.pi / 2
        rotated = evolve_observable(rep.J[(1, 2)], rep.K[0], theta)
        idx = rep.interior_indices(3)
        want = (np.cos(theta) * rep.K[0] - np.sin(theta) * rep.K[1])[np.ix_(idx, idx)]
        assert norm2(rotated[np.ix_(idx, idx)] - want) <= 1e-6


class TestExport:
    def test_npz_and_json_exports(self, tmp_path):
        rep = build_particle_rep(RepConfig(mass=1.0, dims=1, levels=3))
        npz_path = rep.export_matrices(tmp_path / "ops.npz")
        data = np.load(npz_path)
        assert np.array_equal(data["X1"], rep.X[0])
        json_path = rep.export_matrices(tmp_path / "ops.json", fmt="json")
        import json

        loaded = json.loads(json_path.read_text())
        assert np.allclose(np.array(loaded["P1"]["im"]), rep.P[0].imag)
