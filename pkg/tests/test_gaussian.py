import numpy as np
import pytest
from conftest import states
from hypothesis import given

from qwasserstein.errors import SingularInput, UnphysicalState
from qwasserstein.gaussian import (
    OMEGA,
    Explicit,
    GaussianState,
    SqueezedThermal,
    Thermal,
    build_state,
    check_physical,
    coupling_hermitian,
    lemma_positive_definite,
    parse_state_spec,
    purification_cov,
    purification_f,
    thermal_nu_from_q,
    williamson1,
)
from qwasserstein.linalg import min_eig_herm4


def test_omega():
    np.testing.assert_array_equal(OMEGA, -OMEGA.T)
    np.testing.assert_array_equal(OMEGA @ OMEGA, -np.eye(2))


class TestBuildState:
    def test_vacuum(self):
        np.testing.assert_array_equal(build_state(Thermal(0.5)).cov, 0.5 * np.eye(2))
        np.testing.assert_array_equal(GaussianState.vacuum().cov, 0.5 * np.eye(2))

    def test_squeezed(self):
        s = build_state(SqueezedThermal(1.0, 0.5, 0.0))
        np.testing.assert_allclose(s.cov, np.diag([np.exp(-1), np.exp(1)]), atol=1e-15)
        np.testing.assert_allclose(np.diag(s.cov), [0.36788, 2.71828], atol=1e-5)

    def test_rotation_quarter_turn_swaps_quadratures(self):
        s = build_state(SqueezedThermal(1.0, 0.5, np.pi / 2))
        np.testing.assert_allclose(s.cov, np.diag([np.exp(1), np.exp(-1)]), atol=1e-14)

    def test_explicit_unphysical(self):
        with pytest.raises(UnphysicalState):
            build_state(Explicit(((0.4, 0.0), (0.0, 0.4))))

    def test_explicit_displacement(self):
        s = build_state(Explicit(((1.0, 0.0), (0.0, 1.0)), (1.0, -2.0)))
        np.testing.assert_array_equal(s.displacement, [1.0, -2.0])
        assert not s.is_centered

    @pytest.mark.parametrize("spec", [Thermal(0.4), SqueezedThermal(0.3, 0.1), SqueezedThermal(1.0, np.inf)])
    def test_invalid_specs(self, spec):
        with pytest.raises(UnphysicalState):
            build_state(spec)

    def test_hbar_dependent(self):
        build_state(Thermal(0.2), hbar=0.4)
        with pytest.raises(UnphysicalState):
            build_state(Thermal(0.2))

    def test_thermal_q(self):
        assert thermal_nu_from_q(0.0) == 0.5
        assert thermal_nu_from_q(0.25) == pytest.approx(5 / 6)
        assert GaussianState.thermal(1.5).mean_photon_number == pytest.approx(1.0)

    @given(states)
    def test_built_states_are_physical(self, s):
        assert check_physical(s.cov, 1.0, 1e-9)


class TestGaussianState:
    def test_immutable(self):
        s = GaussianState.thermal(1.0)
        with pytest.raises(ValueError):
            s.cov[0, 0] = 2.0

    def test_rejects_asymmetric(self):
        with pytest.raises(UnphysicalState):
            GaussianState(np.array([[1.0, 0.2], [0.0, 1.0]]))

    def test_rejects_not_positive(self):
        with pytest.raises(UnphysicalState):
            GaussianState(-np.eye(2))
        with pytest.raises(UnphysicalState):
            GaussianState(np.eye(3))


class TestCheckPhysical:
    def test_examples(self):
        assert check_physical(0.5 * np.eye(2))
        assert not check_physical(np.diag([0.4, 0.4]))
        assert check_physical(np.diag([0.4, 0.4]), hbar=0.5)

    def test_strongly_squeezed_pure_state(self):
        r = 8.0
        assert check_physical(0.5 * np.diag([np.exp(-2 * r), np.exp(2 * r)]))

    def test_nonfinite_and_shape(self):
        assert not check_physical(np.array([[np.nan, 0.0], [0.0, 1.0]]))
        assert not check_physical(np.eye(3))

    def test_bad_hbar(self):
        with pytest.raises(ValueError):
            check_physical(np.eye(2), hbar=0.0)

    def test_routes_agree(self, rng):
        # the spectral and scalar criteria describe the same set
        for _ in range(2000):
            g = rng.uniform(-1, 1, (2, 2))
            g = g @ g.T + rng.uniform(0, 0.6) * np.eye(2)
            spectral = min_eig_herm4(g + 0.5j * OMEGA) >= -1e-9
            scalar = np.linalg.det(g) >= 0.25 - 1e-9 and np.trace(g) > 0
            if abs(np.linalg.det(g) - 0.25) > 1e-6:
                assert spectral == scalar
                assert check_physical(g) == scalar


class TestLemma:
    def test_examples(self):
        assert lemma_positive_definite(np.eye(2), 0.25 * OMEGA)
        assert not lemma_positive_definite(np.eye(2), OMEGA)
        assert lemma_positive_definite(2 * np.eye(2), 0.5 * OMEGA)

    def test_singular(self):
        with pytest.raises(SingularInput):
            lemma_positive_definite(np.diag([1.0, 0.0]), OMEGA)
        with pytest.raises(SingularInput):
            lemma_positive_definite(np.eye(2), np.zeros((2, 2)))

    def test_matches_hermitian_positivity(self, rng):
        for _ in range(1000):
            s = rng.uniform(-2, 2, (2, 2))
            s = s + s.T
            k = rng.uniform(-2, 2) * OMEGA
            strict = min_eig_herm4(s + 1j * k) > 0
            assert lemma_positive_definite(s, k) == strict


class TestWilliamson:
    def test_thermal(self):
        w = williamson1(2.0 * np.eye(2))
        assert w.nu == pytest.approx(2.0)
        np.testing.assert_allclose(w.S, np.eye(2), atol=1e-15)

    def test_squeezed(self):
        nu, r = 1.3, 0.7
        w = williamson1(nu * np.diag([np.exp(-2 * r), np.exp(2 * r)]))
        assert w.nu == pytest.approx(nu)
        np.testing.assert_allclose(w.S, np.diag([np.exp(-r), np.exp(r)]), atol=1e-12)

    def test_offdiagonal(self):
        w = williamson1(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert w.nu == pytest.approx(np.sqrt(3))
        expected = np.array([[1.36603, 0.36603], [0.36603, 1.36603]]) / 3**0.25
        np.testing.assert_allclose(w.S, expected, atol=1e-5)

    def test_unphysical(self):
        with pytest.raises(UnphysicalState):
            williamson1(np.diag([0.4, 0.4]))

    @given(states)
    def test_reconstruction(self, s):
        w = williamson1(s.cov)
        scale = max(1.0, np.max(np.abs(s.cov)))
        assert np.max(np.abs(w.nu * w.S @ w.S.T - s.cov)) <= 1e-10 * scale
        assert np.max(np.abs(w.S @ OMEGA @ w.S.T - OMEGA)) <= 1e-10 * scale


class TestPurification:
    def test_vacuum(self):
        np.testing.assert_array_equal(purification_f(0.5 * np.eye(2)), np.zeros((2, 2)))
        np.testing.assert_array_equal(purification_cov(0.5 * np.eye(2)), 0.5 * np.eye(4))

    def test_thermal(self):
        np.testing.assert_allclose(purification_f(np.eye(2)), np.sqrt(3) / 2 * np.eye(2), atol=1e-15)

    def test_squeezed(self):
        b = np.diag([np.exp(-1), np.exp(1)])
        np.testing.assert_allclose(purification_f(b), np.sqrt(3) / 2 * b, atol=1e-14)

    def test_gauge_invariant(self):
        # F = sqrt(nu^2 - 1/4) S S^T for any Williamson S, e.g. S O with O orthogonal
        b = np.array([[2.0, 0.7], [0.7, 1.1]])
        w = williamson1(b)
        c, s = np.cos(0.4), np.sin(0.4)
        so = w.S @ np.array([[c, -s], [s, c]])
        np.testing.assert_allclose(purification_f(b), np.sqrt(w.nu**2 - 0.25) * so @ so.T, atol=1e-13)

    @given(states)
    def test_pure_and_physical(self, s):
        g = purification_cov(s.cov)
        for sign in (1, -1):
            m = min_eig_herm4(coupling_hermitian(g, sign))
            assert m >= -1e-9 * max(1.0, np.max(np.abs(g)))
            # saturated: the global state is pure
            assert m <= 1e-9 * max(1.0, np.max(np.abs(g)))
        assert np.linalg.det(g) == pytest.approx(1 / 16, rel=1e-6)


class TestParse:
    def test_kinds(self):
        assert parse_state_spec({"kind": "thermal", "nu": 1}) == Thermal(1.0)
        assert parse_state_spec({"kind": "squeezed_thermal", "nu": 1, "r": 0.5}) == SqueezedThermal(1.0, 0.5, 0.0)
        spec = parse_state_spec({"kind": "explicit", "cov": [[1, 0], [0, 1]]})
        assert spec == Explicit(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))

    @pytest.mark.parametrize(
        "obj",
        [
            [],
            {"nu": 1},
            {"kind": "coherent"},
            {"kind": "thermal"},
            {"kind": "squeezed_thermal", "nu": 1},
            {"kind": "explicit", "cov": [[1, 0, 0]]},
            {"kind": "explicit", "cov": [[1, 0], [0, 1]], "displacement": [1]},
        ],
    )
    def test_malformed(self, obj):
        with pytest.raises(ValueError):
            parse_state_spec(obj)
