"""Local linear guided filters: AWGIF and the GIF / WGIF baselines.

Each filter fits ``Z ~ a * G + b`` in every window, averages the per-window
coefficients into ``a_bar``, ``b_bar`` and returns ``a_bar * G + b_bar``. The
filters differ only in the edge-aware factor, the regularization and the
aggregation weights they plug into that pipeline.

All constants are on the canonical [0, 1] intensity scale.
"""

import logging
from abc import abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from AWGIF_depth_tool.filter_registry import BaseGuidedFilter, FilterMetadata
from AWGIF_depth_tool.image_core import ImageGrid, as_grid, check_same_shape
from AWGIF_depth_tool.windowed_stats import (
    WindowSpec,
    box_mean,
    local_covariance,
    local_variance,
    weighted_box_mean,
)

logger = logging.getLogger(__name__)

# 1 in [0,255]^2 units
DEFAULT_EPSILON = 1.0 / 255 ** 2
DEFAULT_ETA = 1.0 / 200 ** 2
WEIGHT_FLOOR = 0.001
DEGENERATE_DENOMINATOR = 1e-12


@dataclass(frozen=True)
class FilterParams:
    """Window radius, regularization base and the two weighting constants."""
    zeta: int = 2
    lambda0: float = 100.0
    epsilon: float = DEFAULT_EPSILON
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        WindowSpec(self.zeta)  # validates the radius
        for name in ("lambda0", "epsilon", "eta"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value}.")

    @property
    def window(self) -> WindowSpec:
        return WindowSpec(self.zeta)


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Per-pixel slope ``a`` and offset ``b`` of the local linear model."""
    a: ImageGrid
    b: ImageGrid


@dataclass(frozen=True, eq=False)
class FilterOutput:
    base: ImageGrid
    a_bar: ImageGrid
    b_bar: ImageGrid


# --- Pipeline stages ---

def edge_aware_weight(G: ImageGrid, epsilon: float = DEFAULT_EPSILON) -> ImageGrid:
    """Edge-aware factor from 3x3 local variances.

    ``gamma(p) = (var(p) + eps) * mean_q(1 / (var(q) + eps))``; the global mean
    is computed once, so the cost stays linear in the pixel count.
    """
    G = as_grid(G, name="G")
    shifted_var = local_variance(G, 1) + epsilon
    return shifted_var * np.mean(1.0 / shifted_var)


def adaptive_lambda(G: ImageGrid, zeta: int, lambda0: float) -> float:
    """Regularization scaled by the root of the mean local variance of ``G``."""
    G = as_grid(G, name="G")
    return float(lambda0 * np.sqrt(np.mean(local_variance(G, zeta))))


def solve_coefficients(Z: ImageGrid, G: ImageGrid, params: FilterParams,
                       gamma: ImageGrid, lam: float) -> CoefficientField:
    """Closed-form minimizer of the weighted, regularized local fit.

    ``a = gamma * cov(Z, G) / (gamma * var(G) + lam)`` and ``b = mu_Z - a * mu_G``.
    Where the denominator falls below 1e-12 the window is treated as flat:
    ``a = 0`` and ``b = mu_Z``.
    """
    Z = as_grid(Z, name="Z")
    G = as_grid(G, name="G")
    gamma = as_grid(gamma, name="gamma")
    check_same_shape(Z, G, names=("Z", "G"))
    check_same_shape(Z, gamma, names=("Z", "gamma"))

    window = params.window
    mean_Z = box_mean(Z, window)
    mean_G = box_mean(G, window)
    var_G = local_variance(G, window)
    cov = local_covariance(Z, G, window)

    denominator = gamma * var_G + lam
    degenerate = denominator < DEGENERATE_DENOMINATOR
    if np.any(degenerate):
        logger.debug("%d flat windows use the mean fallback", int(np.count_nonzero(degenerate)))
    a = np.where(degenerate, 0.0, gamma * cov / np.where(degenerate, 1.0, denominator))
    b = mean_Z - a * mean_G
    return CoefficientField(a=a, b=b)


def self_guided_coefficients(Z: ImageGrid, params: FilterParams,
                             gamma: Optional[ImageGrid] = None,
                             lam: Optional[float] = None) -> CoefficientField:
    """Coefficients with ``G = Z``; then ``0 <= a < 1`` for ``lam > 0``.

    ``gamma`` and ``lam`` default to the edge-aware factor and the adaptive
    regularization of ``Z``.
    """
    Z = as_grid(Z, name="Z")
    if gamma is None:
        gamma = edge_aware_weight(Z, params.epsilon)
    if lam is None:
        lam = adaptive_lambda(Z, params.zeta, params.lambda0)
    return solve_coefficients(Z, Z, params, gamma, lam)


def aggregation_weights(coeff: CoefficientField, Z: ImageGrid, G: ImageGrid,
                        params: FilterParams) -> ImageGrid:
    """Residual-driven confidence ``exp(-MSR / eta) + 0.001`` per window.

    MSR is the mean squared residual of ``a * G + b - Z`` over the window,
    expanded into local moments so no per-window loop is needed.
    """
    Z = as_grid(Z, name="Z")
    G = as_grid(G, name="G")
    check_same_shape(Z, G, names=("Z", "G"))
    window = params.window
    a, b = coeff.a, coeff.b

    offset = a * box_mean(G, window) + b - box_mean(Z, window)
    msr = (a * a * local_variance(G, window)
           - 2.0 * a * local_covariance(Z, G, window)
           + local_variance(Z, window)
           + offset * offset)
    msr = np.maximum(msr, 0.0)
    return np.exp(-msr / params.eta) + WEIGHT_FLOOR


def aggregate_coefficients(coeff: CoefficientField, W: ImageGrid,
                           zeta: int) -> CoefficientField:
    """W-weighted window averages of ``a`` and ``b`` (``a_bar``, ``b_bar``)."""
    window = WindowSpec(zeta)
    return CoefficientField(
        a=weighted_box_mean(coeff.a, W, window),
        b=weighted_box_mean(coeff.b, W, window),
    )


# --- Filters ---

class BaseLocalLinearFilter(BaseGuidedFilter):
    """Shared pipeline: gamma -> lambda -> (a, b) -> W -> (a_bar, b_bar).

    Subclasses choose the edge-aware factor, the regularization and the
    aggregation weights.
    """

    @abstractmethod
    def get_metadata(self) -> FilterMetadata:
        pass

    @abstractmethod
    def _edge_weight(self, G: ImageGrid, params: FilterParams) -> ImageGrid:
        pass

    @abstractmethod
    def _regularization(self, G: ImageGrid, params: FilterParams) -> float:
        pass

    def _aggregation_weights(self, coeff: CoefficientField, Z: ImageGrid,
                             G: ImageGrid, params: FilterParams) -> ImageGrid:
        return np.ones_like(Z)

    def apply(self, Z: ImageGrid, G: ImageGrid,
              params: Optional[FilterParams] = None) -> FilterOutput:
        params = params or FilterParams()
        Z = as_grid(Z, name="Z")
        G = as_grid(G, name="G")
        check_same_shape(Z, G, names=("Z", "G"))

        gamma = self._edge_weight(G, params)
        lam = self._regularization(G, params)
        if lam == 0:
            logger.warning("Guidance image is constant; every window falls back to its mean.")
        logger.debug("%s: %dx%d, zeta=%d, lambda=%.6g",
                     self.get_metadata().name, Z.shape[1], Z.shape[0], params.zeta, lam)

        coeff = solve_coefficients(Z, G, params, gamma, lam)
        weights = self._aggregation_weights(coeff, Z, G, params)
        averaged = aggregate_coefficients(coeff, weights, params.zeta)
        base = averaged.a * G + averaged.b
        return FilterOutput(base=base, a_bar=averaged.a, b_bar=averaged.b)


def _parameter_table(lambda0_note: str) -> dict:
    return {
        "zeta": {"type": "int", "default": 2, "description": "窓の半径"},
        "lambda0": {"type": "float", "default": 100.0, "description": lambda0_note},
        "epsilon": {"type": "float", "default": DEFAULT_EPSILON, "description": "エッジ重みの定数"},
        "eta": {"type": "float", "default": DEFAULT_ETA, "description": "集約重みの定数"},
    }


class GIFFilter(BaseLocalLinearFilter):
    """基本のガイド付きフィルタ (gamma = 1, lambda = lambda0, 単純平均)"""

    def get_metadata(self) -> FilterMetadata:
        return FilterMetadata(
            name="gif",
            description="Guided image filter (fixed regularization, box aggregation)",
            version="1.0",
            author="AWGIF Team",
            parameters=_parameter_table("固定の正則化係数"),
            category="baseline",
        )

    def _edge_weight(self, G: ImageGrid, params: FilterParams) -> ImageGrid:
        return np.ones_like(G)

    def _regularization(self, G: ImageGrid, params: FilterParams) -> float:
        return params.lambda0


class WGIFFilter(BaseLocalLinearFilter):
    """重み付きガイド付きフィルタ (エッジ重みあり, lambda = lambda0, 単純平均)"""

    def get_metadata(self) -> FilterMetadata:
        return FilterMetadata(
            name="wgif",
            description="Weighted guided image filter (edge-aware factor, box aggregation)",
            version="1.0",
            author="AWGIF Team",
            parameters=_parameter_table("固定の正則化係数"),
            category="baseline",
        )

    def _edge_weight(self, G: ImageGrid, params: FilterParams) -> ImageGrid:
        return edge_aware_weight(G, params.epsilon)

    def _regularization(self, G: ImageGrid, params: FilterParams) -> float:
        return params.lambda0


class AWGIFFilter(BaseLocalLinearFilter):
    """適応重み付きガイド付きフィルタ

    エッジ重み、ガイド画像に適応する正則化、残差に基づく集約重みを組み合わせる。
    """

    def get_metadata(self) -> FilterMetadata:
        return FilterMetadata(
            name="awgif",
            description="Adaptive weighted guided image filter",
            version="1.0",
            author="AWGIF Team",
            parameters=_parameter_table("正則化の基準値 (局所分散の平均で適応的にスケール)"),
            category="adaptive",
        )

    def _edge_weight(self, G: ImageGrid, params: FilterParams) -> ImageGrid:
        return edge_aware_weight(G, params.epsilon)

    def _regularization(self, G: ImageGrid, params: FilterParams) -> float:
        return adaptive_lambda(G, params.zeta, params.lambda0)

    def _aggregation_weights(self, coeff: CoefficientField, Z: ImageGrid,
                             G: ImageGrid, params: FilterParams) -> ImageGrid:
        return aggregation_weights(coeff, Z, G, params)


def awgif(Z: ImageGrid, G: ImageGrid, params: Optional[FilterParams] = None) -> FilterOutput:
    return AWGIFFilter().apply(Z, G, params)


def gif(Z: ImageGrid, G: ImageGrid, params: Optional[FilterParams] = None) -> FilterOutput:
    return GIFFilter().apply(Z, G, params)


def wgif(Z: ImageGrid, G: ImageGrid, params: Optional[FilterParams] = None) -> FilterOutput:
    return WGIFFilter().apply(Z, G, params)
