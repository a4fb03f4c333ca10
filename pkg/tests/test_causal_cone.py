import math

import numpy as np
import pytest

from nccausal.hermitian import (HermMat, MonotoneFn, PAULI_X, PAULI_Y,
                                commutator, is_psd, op_norm, random_herm,
                                spectrum)
from nccausal.causal_cone import (FiniteDirac, MatrixField,
                                  cone_block_matrix, cone_condition_at,
                                  discretization_tolerance,
                                  eigenvalue_clock_probe, field_in_cone,
                                  j_bracket, GAMMA0, GAMMA1,
                                  order_boundary_case, product_state_order,
                                  rotate_state_to_dirac_basis,
                                  scalar_causal_iff, spectral_distance)
from nccausal.isocone import BlochState
from nccausal.minkowski import Event, causal_leq
from oracles import (monotone_slope_at, random_monotone_fn,
                     sup_spectral_distance_batch)

D01 = FiniteDirac(0.0, 1.0)


def time_plus_constant_field(a_const: np.ndarray, n: int = 5,
                             lo: float = -1.0, hi: float = 1.0) -> MatrixField:
    half = 0.5 * np.eye(2, dtype=complex)
    return MatrixField.from_function(
        lambda u, v: ((u + v) / 2.0) * np.eye(2, dtype=complex) + a_const,
        lo, hi, lo, hi, n,
        du=lambda u, v: half, dv=lambda u, v: half,
        family="time-plus-constant")


def scalar_field(coeff_u: float, coeff_v: float, n: int = 5) -> MatrixField:
    eye = np.eye(2, dtype=complex)
    return MatrixField.from_function(
        lambda u, v: (coeff_u * u + coeff_v * v) * eye,
        -1.0, 1.0, -1.0, 1.0, n,
        du=lambda u, v: coeff_u * eye, dv=lambda u, v: coeff_v * eye,
        family="affine")


def equatorial(phi: float) -> BlochState:
    return BlochState([math.cos(phi), math.sin(phi), 0.0])


def state_on_latitude(z: float, phi: float) -> BlochState:
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return BlochState([r * math.cos(phi), r * math.sin(phi), z])


class TestGammaConstants:
    def test_gamma_algebra(self):
        assert np.allclose(GAMMA0 @ GAMMA0, -np.eye(2))
        assert np.allclose(GAMMA1 @ GAMMA1, np.eye(2))
        assert np.allclose(GAMMA0 @ GAMMA1, np.diag([-1.0, 1.0]))

    def test_j_operator_is_a_fundamental_symmetry(self):
        from nccausal.causal_cone import J_OPERATOR
        assert np.allclose(J_OPERATOR @ J_OPERATOR, np.eye(4))
        assert np.allclose(J_OPERATOR, J_OPERATOR.conj().T)
        # j commutes with the inner algebra (it acts on the spinor leg).
        rng = np.random.default_rng(42)
        a = np.kron(np.eye(2), random_herm(rng, 2).mat)
        assert np.abs(J_OPERATOR @ a - a @ J_OPERATOR).max() < 1e-12

    def test_block_reduction_from_first_principles(self):
        # j[D, alpha] assembled from the gamma constants must equal the
        # negated cone block matrix once derivatives are rewritten in
        # light-cone form (du = (dt + dx)/2, dv = (dt - dx)/2).
        rng = np.random.default_rng(0)
        for _ in range(50):
            alpha_t = random_herm(rng, 2).mat
            alpha_x = random_herm(rng, 2).mat
            alpha = random_herm(rng, 2)
            comm = commutator(D01.matrix, alpha)
            bracket = j_bracket(alpha_t, alpha_x, comm)
            alpha_u = (alpha_t + alpha_x) / 2.0
            alpha_v = (alpha_t - alpha_x) / 2.0
            block = cone_block_matrix(alpha_u, alpha_v, comm)
            assert np.abs(bracket + block).max() < 1e-12

    def test_block_matrix_is_hermitian(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            au, av, a = (random_herm(rng, 2) for _ in range(3))
            comm = commutator(D01.matrix, a)
            block = cone_block_matrix(au.mat, av.mat, comm)
            assert np.abs(block - block.conj().T).max() < 1e-12


class TestConeConditionAt:
    def test_scalar_time_function(self):
        half = HermMat(0.5 * np.eye(2))
        t_field = HermMat(np.zeros((2, 2)))
        assert cone_condition_at(half, half, t_field, D01)

    def test_constant_plus_time_iff_commutator_bounded(self):
        rng = np.random.default_rng(2)
        half = HermMat(0.5 * np.eye(2))
        for _ in range(100):
            a = random_herm(rng, 2)
            norm = op_norm(commutator(D01.matrix, a))
            if abs(norm - 1.0) < 1e-6:
                continue
            ok = cone_condition_at(half, half, a, D01)
            assert ok == (norm <= 1.0)

    def test_negative_derivative_fails(self):
        bad = HermMat.diag([0.5, -0.2])
        good = HermMat(0.5 * np.eye(2))
        assert not cone_condition_at(bad, good, HermMat(np.zeros((2, 2))), D01)


class TestFieldInCone:
    def test_constant_scalar_field(self):
        eye = np.eye(2, dtype=complex)
        f = MatrixField.from_function(lambda u, v: 3.0 * eye, -1, 1, -1, 1, 5)
        ok, loc = field_in_cone(f, D01)
        assert ok and loc is None

    def test_time_function_field(self):
        ok, _ = field_in_cone(scalar_field(0.5, 0.5), D01)
        assert ok

    def test_decreasing_field_fails_at_first_node(self):
        ok, loc = field_in_cone(scalar_field(-1.0, 0.0), D01)
        assert not ok and loc == (0, 0)

    def test_finite_difference_derivatives_on_smooth_member(self):
        eye = np.eye(2, dtype=complex)
        fn = lambda u, v: (u + v + 0.05 * math.sin(u) + 0.05 * math.sin(v)) * eye
        f = MatrixField.from_function(fn, -1, 1, -1, 1, 17)
        assert f.derivatives_kind == "finite-difference"
        ok, _ = field_in_cone(f, D01)
        assert ok

    def test_discretization_tolerance_scaling(self):
        eye = np.eye(2, dtype=complex)
        fn = lambda u, v: (math.sin(u) + math.sin(v) + 2.0 * u + 2.0 * v) * eye
        fine = MatrixField.from_function(fn, -1, 1, -1, 1, 33)
        assert discretization_tolerance(fine) > 1e-9
        affine = scalar_field(0.7, 0.3)
        assert discretization_tolerance(affine) == 1e-9


class TestScalarCriterion:
    def test_time_and_space_gradients(self):
        assert scalar_causal_iff(0.5, 0.5)        # f = t
        assert not scalar_causal_iff(0.5, -0.5)   # f = x^1

    def test_matches_cone_condition_on_scalar_embedding(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            a, b = rng.normal(size=2)
            gu, gv = (a + b) / 2.0, (a - b) / 2.0
            direct = scalar_causal_iff(gu, gv)
            assert direct == (a >= abs(b))
            embedded = cone_condition_at(HermMat(gu * np.eye(2)),
                                         HermMat(gv * np.eye(2)),
                                         HermMat(np.zeros((2, 2))), D01, tol=0.0)
            if min(gu, gv) != 0.0:
                assert embedded == direct


class TestSpectralDistance:
    def test_oracle_reveals_chord_over_gap(self):
        # Numerical constrained sup first; the installed closed form
        # (Euclidean chord / gap) must match it.
        rng = np.random.default_rng(4)
        for gap in (0.35, 1.0, 2.4):
            dirac = FiniteDirac(0.0, gap)
            pairs = []
            for _ in range(100):
                z = float(rng.uniform(-0.95, 0.95))
                p1, p2 = rng.uniform(0, 2 * math.pi, size=2)
                s1 = state_on_latitude(z, float(p1))
                s2 = state_on_latitude(z, float(p2))
                pairs.append((s1, s2))
            d_xy = np.array([(s1.n - s2.n)[:2] for s1, s2 in pairs])
            oracle = sup_spectral_distance_batch(gap, d_xy)
            closed = np.array([spectral_distance(dirac, s1, s2) for s1, s2 in pairs])
            assert np.abs(oracle - closed).max() < 1e-6

    def test_equator_antipodal_maximum(self):
        oracle = float(sup_spectral_distance_batch(1.0, np.array([[2.0, 0.0]]))[0])
        assert abs(oracle - 2.0) < 1e-9
        assert abs(spectral_distance(D01, equatorial(0.0), equatorial(math.pi)) - 2.0) < 1e-12

    def test_identical_states(self):
        s = equatorial(0.3)
        assert spectral_distance(D01, s, s) == 0.0

    def test_different_latitudes_infinite(self):
        assert math.isinf(spectral_distance(D01, state_on_latitude(0.2, 0.0),
                                            state_on_latitude(-0.4, 0.0)))

    def test_degenerate_dirac_rejected(self):
        with pytest.raises(ValueError):
            spectral_distance(FiniteDirac(1.0, 1.0), equatorial(0), equatorial(1))

    def test_metric_on_latitude_circle(self):
        rng = np.random.default_rng(5)
        dirac = FiniteDirac(-0.3, 1.1)
        z = 0.4
        for _ in range(300):
            a, b, c = (state_on_latitude(z, float(p))
                       for p in rng.uniform(0, 2 * math.pi, size=3))
            dab = spectral_distance(dirac, a, b)
            assert abs(dab - spectral_distance(dirac, b, a)) < 1e-12
            assert (dab == 0.0) == (np.linalg.norm(a.n - b.n) == 0.0)
            assert dab <= (spectral_distance(dirac, a, c)
                           + spectral_distance(dirac, c, b) + 1e-12)

    def test_non_diagonal_dirac_via_rotation(self):
        rng = np.random.default_rng(6)
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        u, _ = np.linalg.qr(g)
        h = HermMat(u @ np.diag([0.0, 1.0]).astype(complex) @ u.conj().T)
        dirac, basis = FiniteDirac.from_matrix(h)
        assert abs(dirac.gap - 1.0) < 1e-10
        m1 = state_on_latitude(0.25, 0.4)
        m2 = state_on_latitude(0.25, 2.9)
        from nccausal.isocone import bloch_rotation
        rot = bloch_rotation(basis)
        s1 = BlochState(rot @ m1.n)
        s2 = BlochState(rot @ m2.n)
        b1 = rotate_state_to_dirac_basis(s1, basis)
        b2 = rotate_state_to_dirac_basis(s2, basis)
        ref = spectral_distance(FiniteDirac(0.0, 1.0), m1, m2)
        assert abs(spectral_distance(dirac, b1, b2) - ref) < 1e-9


class TestProductStateOrder:
    def test_equal_states_reduce_to_causal(self):
        s = equatorial(1.0)
        assert product_state_order(D01, Event(0, 0), s, Event(1, 0), s)
        assert not product_state_order(D01, Event(0, 0), s, Event(-1, 0), s)

    def test_pure_time_threshold(self):
        s1 = equatorial(0.0)
        s2 = equatorial(2.0)
        d = spectral_distance(D01, s1, s2)
        assert product_state_order(D01, Event(0, 0), s1, Event(d + 0.01, 0), s2)
        assert not product_state_order(D01, Event(0, 0), s1, Event(d - 0.01, 0), s2)

    def test_different_latitudes_never_related(self):
        s1 = state_on_latitude(0.1, 0.0)
        s2 = state_on_latitude(0.6, 0.0)
        assert not product_state_order(D01, Event(0, 0), s1, Event(100.0, 0), s2)

    def test_boundary_flag(self):
        s1, s2 = equatorial(0.0), equatorial(1.2)
        d = spectral_distance(D01, s1, s2)
        assert order_boundary_case(D01, Event(0, 0), s1, Event(d, 0), s2)
        assert not order_boundary_case(D01, Event(0, 0), s1, Event(d + 1.0, 0), s2)

    def test_partial_order_sampled(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            z = float(rng.uniform(-0.9, 0.9))
            s1 = state_on_latitude(z, float(rng.uniform(0, 2 * math.pi)))
            x = Event(float(rng.normal()), float(rng.normal()))
            assert product_state_order(D01, x, s1, x, s1)
            dt1, dt2 = abs(rng.normal()) + 0.1, abs(rng.normal()) + 0.1
            y = Event(x.x0 + dt1, x.x1 + rng.uniform(-0.9, 0.9) * dt1)
            zed = Event(y.x0 + dt2, y.x1 + rng.uniform(-0.9, 0.9) * dt2)
            s2 = state_on_latitude(z, float(rng.uniform(0, 2 * math.pi)))
            s3 = state_on_latitude(z, float(rng.uniform(0, 2 * math.pi)))
            if (product_state_order(D01, x, s1, y, s2)
                    and product_state_order(D01, y, s2, zed, s3)):
                assert product_state_order(D01, x, s1, zed, s3)


class TestOperatorOrderConsequence:
    def fixtures(self):
        return [time_plus_constant_field(0.6 * PAULI_X),
                scalar_field(0.5, 0.5),
                MatrixField.from_function(
                    lambda u, v: np.diag([u, v]).astype(complex),
                    -1, 1, -1, 1, 5,
                    du=lambda u, v: np.diag([1.0, 0.0]).astype(complex),
                    dv=lambda u, v: np.diag([0.0, 1.0]).astype(complex),
                    family="affine")]

    def test_cone_members_are_operator_monotone_along_causality(self):
        for f in self.fixtures():
            ok, _ = field_in_cone(f, D01)
            assert ok
            rng = np.random.default_rng(8)
            for _ in range(60):
                i1, j1 = rng.integers(0, f.n, size=2)
                i2 = int(rng.integers(i1, f.n))
                j2 = int(rng.integers(j1, f.n))
                diff = f.value_at(i2, j2) - f.value_at(int(i1), int(j1))
                assert is_psd(diff, tol=1e-9)

    def test_causality_recovered_from_fixture_fields(self):
        # diag(u, v) packs two time functions: its operator order alone
        # pins the causal order; the other members never contradict it.
        fields = self.fixtures()
        f0 = fields[0]
        rng = np.random.default_rng(9)
        for _ in range(200):
            i1, j1, i2, j2 = (int(k) for k in rng.integers(0, f0.n, size=4))
            x, y = f0.event_at(i1, j1), f0.event_at(i2, j2)
            all_increase = all(
                is_psd(f.value_at(i2, j2) - f.value_at(i1, j1), tol=1e-9)
                for f in fields)
            assert all_increase == causal_leq(x, y)


class TestEigenvalueClockProbe:
    def test_scalar_field_has_no_inversion(self):
        f = scalar_field(0.5, 0.5)
        report = eigenvalue_clock_probe(f, f.event_at(0, 0), f.event_at(2, 2))
        assert report.monotone_along_paths
        assert not report.inversion_found
        assert report.eig_at_x[0] == report.eig_at_x[1]

    def test_split_diagonal_exhibits_inversion(self):
        f = time_plus_constant_field(np.diag([0.0, 10.0]).astype(complex))
        ok, _ = field_in_cone(f, D01)
        assert ok
        report = eigenvalue_clock_probe(f, f.event_at(0, 0), f.event_at(1, 1))
        assert report.monotone_along_paths
        assert report.inversion_found
        a = report.inversion["node_a"]
        b = report.inversion["node_b"]
        assert a[0] <= b[0] and a[1] <= b[1]
        assert report.inversion["upper_at_a"] > report.inversion["lower_at_b"]

    def test_requires_grid_nodes_and_causal_pair(self):
        f = scalar_field(0.5, 0.5)
        with pytest.raises(ValueError):
            eigenvalue_clock_probe(f, Event(0.123, 0.456), f.event_at(2, 2))
        with pytest.raises(ValueError):
            eigenvalue_clock_probe(f, f.event_at(2, 2), f.event_at(0, 0))


class TestMonotoneCalculusEscapesCone:
    @staticmethod
    def composite_field(a: HermMat, f: MonotoneFn, lo: float, hi: float,
                        n: int) -> MatrixField:
        spec = spectrum(a)

        def val(u, v):
            t = (u + v) / 2.0
            return sum(float(f(t + lam)) * p.mat
                       for lam, p in zip(spec.eigenvalues, spec.projectors))

        def deriv(u, v):
            t = (u + v) / 2.0
            return sum(0.5 * monotone_slope_at(f, t + float(lam)) * p.mat
                       for lam, p in zip(spec.eigenvalues, spec.projectors))

        return MatrixField.from_function(val, lo, hi, lo, hi, n,
                                         du=deriv, dv=deriv,
                                         family="monotone-composite")

    def _nodes_clear_of_knots(self, f, a, lo, hi, n):
        spec = spectrum(a)
        ts = {(u + v) / 2.0 for u in np.linspace(lo, hi, n)
              for v in np.linspace(lo, hi, n)}
        for t in ts:
            for lam in spec.eigenvalues:
                if np.min(np.abs(f.knots - (t + lam))) < 1e-4:
                    return False
        return True

    def test_explicit_escape_instance(self):
        a = HermMat(0.999 * PAULI_X)
        base = time_plus_constant_field(a.mat, n=5, lo=-0.53, hi=0.47)
        ok, _ = field_in_cone(base, D01)
        assert ok
        f = MonotoneFn([-1.0, 0.0, 1.0], [-1.0, 0.0, 5.0])
        comp = self.composite_field(a, f, -0.53, 0.47, 5)
        assert self._nodes_clear_of_knots(f, a, -0.53, 0.47, 5)
        escaped, loc = field_in_cone(comp, D01, tol=1e-9)
        assert not escaped and loc is not None

    def test_randomized_search_finds_escape(self):
        rng = np.random.default_rng(10)
        found = 0
        for _ in range(120):
            raw = random_herm(rng, 2)
            norm = op_norm(commutator(D01.matrix, raw))
            if norm < 1e-6:
                continue
            a = (float(rng.uniform(0.85, 0.995)) / norm) * raw
            base = time_plus_constant_field(a.mat, n=5, lo=-0.93, hi=0.87)
            in_cone, _ = field_in_cone(base, D01)
            if not in_cone:
                continue
            f = random_monotone_fn(rng, max_knots=4, span=1.5)
            if not self._nodes_clear_of_knots(f, a, -0.93, 0.87, 5):
                continue
            comp = self.composite_field(a, f, -0.93, 0.87, 5)
            escaped, _ = field_in_cone(comp, D01, tol=1e-9)
            if not escaped:
                found += 1
        assert found >= 1


class TestMatrixFieldInterface:
    def test_json_roundtrip_finite_difference(self):
        eye = np.eye(2, dtype=complex)
        f = MatrixField.from_function(lambda u, v: (u * u + v) * eye, 0, 1, 0, 1, 5)
        g = MatrixField.from_json(f.to_json())
        assert g.derivatives_kind == "finite-difference"
        assert np.abs(g.values - f.values).max() < 1e-12
        assert np.abs(g.deriv_u - f.deriv_u).max() < 1e-12

    def test_json_analytic_time_plus_constant(self):
        f = time_plus_constant_field(0.4 * PAULI_Y)
        g = MatrixField.from_json(f.to_json())
        assert g.derivatives_kind == "analytic:time-plus-constant"
        assert np.abs(g.deriv_u - 0.5 * np.eye(2)).max() < 1e-12

    def test_json_analytic_affine_is_exact(self):
        f = scalar_field(0.7, -0.2)
        g = MatrixField.from_json(f.to_json())
        assert np.abs(g.deriv_u - f.deriv_u).max() < 1e-10

    def test_validation(self):
        eye = np.eye(2, dtype=complex)
        with pytest.raises(ValueError):
            MatrixField(0, 1, 0, 1, 2, np.zeros((2, 2, 2, 2), dtype=complex))
        bad = np.zeros((3, 3, 2, 2), dtype=complex)
        bad[0, 0] = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            MatrixField(0, 1, 0, 1, 3, bad)

    def test_node_index(self):
        f = scalar_field(0.5, 0.5)
        assert f.node_index(f.event_at(2, 3)) == (2, 3)
        with pytest.raises(ValueError):
            f.node_index(Event(100.0, 0.0))
