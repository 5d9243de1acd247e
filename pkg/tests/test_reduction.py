"""Momentum map, level sets, rays, and the projected ray flow."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoschro.errors import (
    BasisMismatch,
    NonNegativeMu,
    NotTangent,
    RankCollapse,
    ZeroVector,
)
from geoschro.dynamics import CoefficientFn, IntegratorSpec, TDepHamiltonian
from geoschro.hilbert import BasisSpec, StateVector, TangentVector, symplectic_form
from geoschro.numerics import random_state
from geoschro.operators import build_identity, build_quadratics
from geoschro.reduction import (
    LevelSetPoint,
    ProjectorState,
    Ray,
    commuting_diagram_residual,
    dominant_ray,
    fubini_study_distance,
    horizontal_project,
    level_set_project,
    momentum_map,
    momentum_tangent_map,
    paired_records,
    projector_of,
    ray_of,
    reduced_hamiltonian,
    reduced_propagate,
    reduced_symplectic_form,
    u1_act,
    vertical_vector,
)


def _unit(basis, index):
    c = np.zeros(basis.size)
    c[index] = 1.0
    return StateVector(basis, c)


def _oscillator(size):
    basis = BasisSpec.hermite(size)
    x2, p2, _ = build_quadratics(basis)
    return TDepHamiltonian((
        (CoefficientFn.constant(0.5), p2, "kinetic"),
        (CoefficientFn.constant(0.5), x2, "potential"),
    ))


def _driven(size):
    basis = BasisSpec.hermite(size)
    x2, p2, _ = build_quadratics(basis)
    return TDepHamiltonian((
        (CoefficientFn.constant(0.5), p2, "kinetic"),
        (CoefficientFn.constant(0.5), x2, "potential"),
        (CoefficientFn.sinusoid(0.05, 1.0), x2, "drive"),
    ))


class TestMomentumMap:
    def test_unit_vector_value(self):
        assert momentum_map(_unit(BasisSpec.hermite(4), 0)) == -0.5

    def test_scaling(self):
        basis = BasisSpec.hermite(3)
        psi = StateVector(basis, [2.0, 0.0, 0.0])
        assert momentum_map(psi) == -2.0

    def test_tangent_map_matches_directional_derivative(self):
        psi = random_state(8, 0)
        phi = TangentVector(psi, random_state(8, 1))
        got = momentum_tangent_map(phi)
        eps = 1e-4

        def J(s):
            return momentum_map(StateVector(psi.basis,
                                            psi.coefficients + s * phi.direction.coefficients))

        # J is quadratic along the line, central difference is exact
        assert got == pytest.approx((J(eps) - J(-eps)) / (2 * eps), abs=1e-9)


class TestLevelSet:
    def test_projection_hits_level(self):
        psi = random_state(8, 5)
        pt = level_set_project(psi, -0.5)
        assert abs(momentum_map(pt.state) + 0.5) < 1e-14
        pt2 = level_set_project(psi, -2.0)
        assert abs(momentum_map(pt2.state) + 2.0) < 1e-13

    def test_projection_keeps_the_ray(self):
        psi = random_state(8, 6)
        pt = level_set_project(psi, -0.5)
        assert fubini_study_distance(ray_of(psi), ray_of(pt.state)) < 1e-12

    def test_rejects_bad_inputs(self):
        basis = BasisSpec.hermite(3)
        with pytest.raises(NonNegativeMu):
            level_set_project(_unit(basis, 0), 0.0)
        with pytest.raises(NonNegativeMu):
            level_set_project(_unit(basis, 0), 1.0)
        with pytest.raises(ZeroVector):
            level_set_project(StateVector(basis, np.zeros(3)), -0.5)

    def test_level_set_point_validates_membership(self):
        basis = BasisSpec.hermite(3)
        with pytest.raises(ZeroVector):
            LevelSetPoint(_unit(basis, 0), -2.0)

    def test_phase_action_preserves_level_and_ray(self):
        pt = level_set_project(random_state(6, 2), -0.5)
        moved = u1_act(0.7, pt)
        assert momentum_map(moved.state) == pytest.approx(pt.mu, abs=1e-14)
        assert fubini_study_distance(ray_of(moved.state), ray_of(pt.state)) < 1e-13


class TestRays:
    def test_canonical_anchor_is_real_positive(self):
        basis = BasisSpec.hermite(4)
        psi = StateVector(basis, [0.0, -1j, 1.0, 0.0])
        r = ray_of(psi).representative.coefficients
        # anchor is the first live coefficient (index 1)
        assert r[1].real > 0 and abs(r[1].imag) < 1e-15
        assert np.linalg.norm(r) == pytest.approx(1.0, abs=1e-14)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            ray_of(StateVector(BasisSpec.hermite(2), np.zeros(2)))

    def test_ray_constructor_validates(self):
        basis = BasisSpec.hermite(2)
        with pytest.raises(ZeroVector):
            Ray(StateVector(basis, [2.0, 0.0]))
        with pytest.raises(ZeroVector):
            Ray(StateVector(basis, [1j, 0.0]))

    def test_json_round_trip(self):
        r = ray_of(random_state(5, 3))
        back = Ray.from_json_dict(r.to_json_dict())
        assert np.array_equal(back.representative.coefficients,
                              r.representative.coefficients)

    @given(st.integers(0, 10 ** 6))
    def test_projective_invariance(self, seed):
        rng = np.random.default_rng(seed)
        psi = random_state(7, seed)
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if abs(z) < 1e-3:
            z = 1.0 + 1j
        scaled = StateVector(psi.basis, z * psi.coefficients)
        assert fubini_study_distance(ray_of(psi), ray_of(scaled)) < 1e-12


class TestFubiniStudy:
    def test_identical_rays(self):
        r = ray_of(random_state(6, 1))
        assert fubini_study_distance(r, r) == 0.0

    def test_known_angles(self):
        basis = BasisSpec.hermite(3)
        e0, e1 = _unit(basis, 0), _unit(basis, 1)
        half = StateVector(basis, np.array([1.0, 1.0, 0.0]) / np.sqrt(2))
        assert fubini_study_distance(ray_of(e0), ray_of(e1)) == pytest.approx(np.pi / 2, abs=1e-15)
        assert fubini_study_distance(ray_of(e0), ray_of(half)) == pytest.approx(np.pi / 4, abs=1e-12)

    def test_small_angles_resolved(self):
        # the arcsin branch keeps full precision near zero separation, where
        # arccos(|overlap|) would return 0 outright
        basis = BasisSpec.hermite(2)
        eps = 1e-9
        a = ray_of(_unit(basis, 0))
        b = ray_of(StateVector(basis, [np.cos(eps), np.sin(eps)]))
        assert fubini_study_distance(a, b) == pytest.approx(eps, rel=1e-6)

    def test_basis_mismatch(self):
        with pytest.raises(BasisMismatch):
            fubini_study_distance(ray_of(_unit(BasisSpec.hermite(2), 0)),
                                  ray_of(_unit(BasisSpec.hermite(3), 0)))


class TestHorizontalSplit:
    def test_vertical_vector_projects_to_zero(self):
        pt = level_set_project(random_state(8, 4), -0.5)
        h = horizontal_project(vertical_vector(pt))
        assert np.max(np.abs(h.direction.coefficients)) < 1e-12

    def test_orthogonal_direction_unchanged(self):
        basis = BasisSpec.hermite(4)
        pt = level_set_project(_unit(basis, 0), -0.5)
        phi = TangentVector(pt.state, _unit(basis, 1))
        h = horizontal_project(phi)
        assert np.array_equal(h.direction.coefficients, phi.direction.coefficients)

    def test_radial_direction_rejected(self):
        basis = BasisSpec.hermite(4)
        pt = level_set_project(_unit(basis, 0), -0.5)
        radial = TangentVector(pt.state, pt.state)
        with pytest.raises(NotTangent):
            horizontal_project(radial)

    def test_horizontal_part_is_phase_orthogonal(self):
        pt = level_set_project(random_state(10, 8), -0.5)
        psi = pt.state
        # build a tangent direction: remove the radial component first
        raw = random_state(10, 9)
        r = complex(np.vdot(psi.coefficients, raw.coefficients)).real
        n2 = float(np.linalg.norm(psi.coefficients)) ** 2
        tangent = StateVector(psi.basis, raw.coefficients - (r / n2) * psi.coefficients)
        h = horizontal_project(TangentVector(psi, tangent))
        assert abs(complex(np.vdot(psi.coefficients, h.direction.coefficients)).imag) < 1e-13


class TestReducedStructures:
    def test_reduced_form_on_coordinate_pair(self):
        basis = BasisSpec.hermite(3)
        pt = level_set_project(_unit(basis, 0), -0.5)
        v = TangentVector(pt.state, _unit(basis, 1))
        w = TangentVector(pt.state, StateVector(basis, 1j * _unit(basis, 1).coefficients))
        assert reduced_symplectic_form(v, w) == 1.0
        assert reduced_symplectic_form(w, v) == -1.0

    def test_reduced_form_agrees_with_upstairs_on_horizontal_vectors(self):
        pt = level_set_project(random_state(8, 12), -0.5)
        psi = pt.state
        dirs = []
        n2 = float(np.linalg.norm(psi.coefficients)) ** 2
        for seed in (13, 14):
            raw = random_state(8, seed)
            r = complex(np.vdot(psi.coefficients, raw.coefficients)).real
            tangent = StateVector(psi.basis, raw.coefficients - (r / n2) * psi.coefficients)
            dirs.append(horizontal_project(TangentVector(psi, tangent)))
        got = reduced_symplectic_form(dirs[0], dirs[1])
        assert got == pytest.approx(symplectic_form(dirs[0], dirs[1]), abs=1e-13)

    def test_reduced_form_needs_common_base(self):
        basis = BasisSpec.hermite(3)
        a = TangentVector(_unit(basis, 0), _unit(basis, 1))
        b = TangentVector(_unit(basis, 1), _unit(basis, 0))
        with pytest.raises(BasisMismatch):
            reduced_symplectic_form(a, b)

    def test_reduced_hamiltonian_identity(self):
        basis = BasisSpec.hermite(4)
        r = ray_of(_unit(basis, 0))
        assert reduced_hamiltonian(build_identity(basis), r, -0.5) == 0.5

    def test_reduced_hamiltonian_oscillator_ground(self):
        basis = BasisSpec.hermite(4)
        x2, p2, _ = build_quadratics(basis)
        from geoschro.operators import OperatorMatrix

        H = OperatorMatrix.from_matrix(basis, 0.5 * (x2.matrix + p2.matrix))
        assert reduced_hamiltonian(H, ray_of(_unit(basis, 0)), -0.5) == 0.25

    def test_reduced_hamiltonian_scales_with_mu(self):
        basis = BasisSpec.hermite(4)
        r = ray_of(_unit(basis, 0))
        ident = build_identity(basis)
        assert reduced_hamiltonian(ident, r, -2.0) == 2.0
        with pytest.raises(NonNegativeMu):
            reduced_hamiltonian(ident, r, 0.5)

    def test_representative_independence(self):
        basis = BasisSpec.hermite(6)
        psi = random_state(6, 20)
        r1 = ray_of(psi)
        rotated = StateVector(basis, np.exp(0.9j) * psi.coefficients)
        r2 = ray_of(rotated)
        x2 = build_quadratics(basis)[0]
        assert abs(reduced_hamiltonian(x2, r1, -0.5)
                   - reduced_hamiltonian(x2, r2, -0.5)) < 1e-13


class TestProjectors:
    def test_fresh_projector_is_clean(self):
        r = ray_of(random_state(6, 0))
        d = projector_of(r).drift()
        assert d["trace"] < 1e-14
        assert d["hermiticity"] < 1e-16
        assert d["idempotency"] < 1e-15

    def test_dominant_ray_round_trip(self):
        r = ray_of(random_state(9, 17))
        back = dominant_ray(projector_of(r))
        assert fubini_study_distance(r, back) < 1e-12

    def test_rank_collapse_detected(self):
        basis = BasisSpec.hermite(2)
        mixed = ProjectorState(basis, np.eye(2, dtype=complex) / 2)
        with pytest.raises(RankCollapse):
            dominant_ray(mixed)


class TestReducedPropagation:
    def test_eigenstate_ray_is_stationary(self):
        H = _oscillator(8)
        ray0 = ray_of(_unit(BasisSpec.hermite(8), 2))
        records, drifts = reduced_propagate(H, ray0, 1e-3, 0.0, 1.0, stride=200)
        # the projector commutes with the diagonal generator exactly
        for rec in records:
            assert rec.fs_distance_to_initial == 0.0
        assert drifts["idempotency"] == 0.0

    def test_identity_hamiltonian_freezes_the_ray(self):
        basis = BasisSpec.hermite(5)
        H = TDepHamiltonian(((CoefficientFn.constant(1.0), build_identity(basis), "id"),))
        ray0 = ray_of(random_state(5, 3))
        records, _ = reduced_propagate(H, ray0, 1e-2, 0.0, 1.0, stride=50)
        for rec in records:
            assert rec.fs_distance_to_initial < 1e-13

    def test_two_level_period(self):
        H = _oscillator(4)
        basis = BasisSpec.hermite(4)
        psi0 = StateVector(basis, np.array([1.0, 1.0, 0, 0]) / np.sqrt(2))
        ray0 = ray_of(psi0)
        records, drifts = reduced_propagate(H, ray0, 1e-3, 0.0, 2 * np.pi, stride=10 ** 6)
        assert records[-1].fs_distance_to_initial < 1e-7
        assert drifts["hermiticity"] < 1e-12

    def test_record_times_exact_pass_through(self):
        H = _driven(6)
        ray0 = ray_of(random_state(6, 1))
        wanted = [0.0, 0.37, 0.5, 1.0]
        records, _ = reduced_propagate(H, ray0, 1e-2, 0.0, 1.0, record_times=wanted)
        assert [r.t for r in records] == wanted

    def test_input_validation(self):
        H = _oscillator(4)
        ray0 = ray_of(_unit(BasisSpec.hermite(4), 0))
        with pytest.raises(ValueError):
            reduced_propagate(H, ray0, -1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            reduced_propagate(H, ray0, 0.1, 1.0, 0.0)
        with pytest.raises(BasisMismatch):
            reduced_propagate(H, ray_of(_unit(BasisSpec.hermite(5), 0)), 0.1, 0.0, 1.0)


class TestCommutingDiagram:
    def test_zero_duration_residual_vanishes(self):
        H = _oscillator(6)
        res = commuting_diagram_residual(H, random_state(6, 2), -0.5,
                                         IntegratorSpec("exact_eig", 0.1), 0.1, 0.0, 0.0)
        assert res == 0.0

    def test_identity_hamiltonian(self):
        basis = BasisSpec.hermite(6)
        H = TDepHamiltonian(((CoefficientFn.constant(1.0), build_identity(basis), "id"),))
        res = commuting_diagram_residual(H, random_state(6, 4), -0.5,
                                         IntegratorSpec("exact_eig", 0.1), 0.1, 0.0, 2.0)
        assert res <= 1e-12

    def test_driven_flow_closes(self):
        H = _driven(16)
        res = commuting_diagram_residual(H, random_state(16, 8), -0.5,
                                         IntegratorSpec("magnus2", 1e-3), 1e-3,
                                         0.0, 1.0, stride=100)
        assert res <= 1e-6

    def test_paired_records_share_times(self):
        H = _driven(8)
        up, down, drifts = paired_records(H, random_state(8, 6), -0.5,
                                          IntegratorSpec("magnus2", 1e-2), 1e-2,
                                          0.0, 0.55, stride=10)
        assert [r.t for r in up] == [r.t for r in down]
        assert set(drifts) == {"trace", "hermiticity", "idempotency"}
