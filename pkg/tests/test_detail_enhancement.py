import numpy as np
import pytest

from AWGIF_depth_tool.detail_enhancement import (
    CASE_NAMES,
    Decomposition,
    EnhancementParams,
    UnknownCaseError,
    case_preset,
    decompose,
    enhance,
)
from AWGIF_depth_tool.guided_filters import FilterParams, GIFFilter, gif
from AWGIF_depth_tool.image_core import ShapeMismatchError


class TestEnhancementParams:

    def test_defaults(self):
        assert EnhancementParams() == EnhancementParams(alpha=0.0, beta=1.0)

    @pytest.mark.parametrize("alpha, beta", [(-0.1, 1.0), (0.0, -1.0)])
    def test_negative_gains(self, alpha, beta):
        with pytest.raises(ValueError):
            EnhancementParams(alpha=alpha, beta=beta)


class TestDecompose:

    def setup_method(self):
        rng = np.random.default_rng(0)
        self.Z = rng.random((20, 20))
        self.G = rng.random((20, 20))

    def test_constant_inputs_have_no_detail(self):
        Z = np.full((10, 10), 0.4)
        decomposition = decompose(Z, Z)
        np.testing.assert_array_equal(decomposition.detail, 0.0)

    def test_base_plus_detail_reconstructs_input(self):
        decomposition = decompose(self.Z, self.G, FilterParams(zeta=3, lambda0=10.0))
        np.testing.assert_allclose(decomposition.base + decomposition.detail, self.Z,
                                   rtol=0, atol=1e-15)

    def test_uses_given_filter(self):
        params = FilterParams(zeta=2, lambda0=5.0)
        decomposition = decompose(self.Z, self.G, params, GIFFilter())
        np.testing.assert_array_equal(decomposition.base, gif(self.Z, self.G, params).base)

    def test_step_edge_goes_to_base(self):
        Z = np.zeros((32, 32))
        Z[:, 16:] = 1.0
        decomposition = decompose(Z, Z, FilterParams(zeta=2, lambda0=1e-3))
        detail_energy = np.sum(decomposition.detail ** 2)
        deviation_energy = np.sum((Z - Z.mean()) ** 2)
        assert detail_energy < 0.01 * deviation_energy

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            decompose(self.Z, self.G[:-1])


class TestEnhance:

    def setup_method(self):
        rng = np.random.default_rng(1)
        Z = rng.random((16, 16))
        self.Z = Z
        self.decomposition = decompose(Z, Z, FilterParams(zeta=2, lambda0=1.0))

    def test_unit_alpha_reconstructs(self):
        np.testing.assert_allclose(enhance(self.decomposition, EnhancementParams(1.0, 0.0)),
                                   self.Z, atol=1e-12)

    def test_zero_gains_give_base(self):
        np.testing.assert_array_equal(enhance(self.decomposition, EnhancementParams(0.0, 0.0)),
                                      self.decomposition.base)

    def test_adaptive_gain_example(self):
        decomposition = Decomposition(base=np.full((3, 3), 0.3), detail=np.full((3, 3), 0.2),
                                      a_bar=np.full((3, 3), 0.5))
        np.testing.assert_allclose(enhance(decomposition, EnhancementParams(0.0, 1.0)), 0.4)

    def test_no_clamping(self):
        decomposition = Decomposition(base=np.full((2, 2), 0.9), detail=np.full((2, 2), 0.5),
                                      a_bar=np.ones((2, 2)))
        assert enhance(decomposition, EnhancementParams(3.0, 0.0)).max() == pytest.approx(2.4)

    def test_detail_grows_monotonically_with_beta(self):
        base = self.decomposition.base
        previous = np.zeros_like(base)
        for beta in (0.0, 0.5, 1.0, 1.5, 3.0):
            deviation = np.abs(enhance(self.decomposition, EnhancementParams(0.5, beta)) - base)
            assert np.all(deviation >= previous - 1e-15)
            previous = deviation

    def test_hybrid_case_suppresses_flat_noise(self):
        rng = np.random.default_rng(2)
        Z = 0.5 + 0.05 * rng.standard_normal((48, 48))
        decomposition = decompose(Z, Z, FilterParams(zeta=3, lambda0=100.0))
        hybrid = enhance(decomposition, EnhancementParams(alpha=0.0, beta=1.0))
        plain = enhance(decomposition, EnhancementParams(alpha=1.0, beta=0.0))
        assert np.var(hybrid) < np.var(plain)


class TestCasePreset:

    @pytest.mark.parametrize("name, expected", [
        ("smooth", (0.0, 0.0)),
        ("enhance", (3.0, 0.0)),
        ("selective", (1.0, 1.0)),
        ("hybrid", (0.0, 1.0)),
    ])
    def test_presets(self, name, expected):
        params = case_preset(name)
        assert (params.alpha, params.beta) == expected

    def test_configured_betas(self):
        assert case_preset("selective", selective_beta=2.5).beta == 2.5
        assert case_preset("hybrid", hybrid_beta=4.0).beta == 4.0

    def test_unknown_case(self):
        with pytest.raises(UnknownCaseError, match="unknown"):
            case_preset("unknown")

    def test_case_names(self):
        assert CASE_NAMES == ("smooth", "enhance", "selective", "hybrid")
