"""Base/detail decomposition and detail amplification.

``Z_f = Z_b + (alpha + beta * a_bar) * Z_d`` covers four useful cases:

- smooth    (0, 0): edge-preserving smoothing, the base layer alone
- enhance   (3, 0): uniform detail boost
- selective (1, beta): keep the detail, boost it further along edges
- hybrid    (0, beta): keep detail only where ``a_bar`` is large, i.e. at edges
"""

import logging
from dataclasses import dataclass
from typing import Optional

from AWGIF_depth_tool.filter_registry import GuidedFilter
from AWGIF_depth_tool.guided_filters import AWGIFFilter, FilterParams
from AWGIF_depth_tool.image_core import ImageGrid, as_grid, check_same_shape

logger = logging.getLogger(__name__)

CASE_NAMES = ("smooth", "enhance", "selective", "hybrid")


class UnknownCaseError(ValueError):
    """Raised for an amplification case name that does not exist."""
    pass


@dataclass(frozen=True)
class EnhancementParams:
    alpha: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}.")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}.")


@dataclass(frozen=True, eq=False)
class Decomposition:
    """``base + detail`` reproduces the decomposed image."""
    base: ImageGrid
    detail: ImageGrid
    a_bar: ImageGrid


def decompose(Z: ImageGrid, G: ImageGrid, params: Optional[FilterParams] = None,
              guided_filter: Optional[GuidedFilter] = None) -> Decomposition:
    """Split ``Z`` into a guided-filter base layer and the residual detail layer.

    Args:
        Z: image or normalized depth map to decompose.
        G: guidance image of the same shape.
        params: filter parameters; defaults to ``FilterParams()``.
        guided_filter: filter producing the base layer; AWGIF when omitted.
    """
    Z = as_grid(Z, name="Z")
    G = as_grid(G, name="G")
    check_same_shape(Z, G, names=("Z", "G"))
    guided_filter = guided_filter or AWGIFFilter()
    output = guided_filter.apply(Z, G, params or FilterParams())
    return Decomposition(base=output.base, detail=Z - output.base, a_bar=output.a_bar)


def enhance(decomposition: Decomposition, params: EnhancementParams) -> ImageGrid:
    """Recombine with the amplified detail: ``base + (alpha + beta * a_bar) * detail``.

    No clamping is applied.
    """
    gain = params.alpha + params.beta * decomposition.a_bar
    return decomposition.base + gain * decomposition.detail


def case_preset(name: str, selective_beta: float = 1.0,
                hybrid_beta: float = 1.0) -> EnhancementParams:
    """Return the (alpha, beta) pair of a named amplification case.

    Raises:
        UnknownCaseError: ``name`` is not one of smooth, enhance, selective, hybrid.
    """
    presets = {
        "smooth": EnhancementParams(alpha=0.0, beta=0.0),
        "enhance": EnhancementParams(alpha=3.0, beta=0.0),
        "selective": EnhancementParams(alpha=1.0, beta=selective_beta),
        "hybrid": EnhancementParams(alpha=0.0, beta=hybrid_beta),
    }
    if name not in presets:
        raise UnknownCaseError(
            f"Unknown case '{name}'. Choose from {', '.join(CASE_NAMES)}.")
    logger.debug("Case %s -> %s", name, presets[name])
    return presets[name]
