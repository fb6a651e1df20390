"""Shape-from-focus front end and the depth enhancement entry point.

stack -> GLV focus volume -> aggregated volume -> argmax depth
      -> mean-intensity guidance -> guided decomposition -> amplified detail
"""

import logging
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from AWGIF_depth_tool.detail_enhancement import Decomposition, EnhancementParams, decompose, enhance
from AWGIF_depth_tool.guided_filters import FilterParams
from AWGIF_depth_tool.image_core import DepthMap, FocusVolume, ImageGrid, ImageStack
from AWGIF_depth_tool.plugin_loader import FILTER_REGISTRY
from AWGIF_depth_tool.windowed_stats import box_mean, local_variance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SffParams:
    """Focus measure window, volume aggregation, filter and amplification settings."""
    fm_radius: int = 2
    agg_radius: int = 2
    filter: FilterParams = field(default_factory=FilterParams)
    beta: float = 1.0
    alpha: float = 0.0
    filter_name: str = "awgif"

    def __post_init__(self):
        if self.fm_radius < 1:
            raise ValueError(f"fm_radius must be >= 1, got {self.fm_radius}.")
        if self.agg_radius < 0:
            raise ValueError(f"agg_radius must be >= 0, got {self.agg_radius}.")
        if self.filter_name not in FILTER_REGISTRY:
            raise ValueError(
                f"unsupported filter '{self.filter_name}'. "
                f"Choose from {', '.join(FILTER_REGISTRY.list_filters())}.")
        EnhancementParams(alpha=self.alpha, beta=self.beta)

    @property
    def enhancement(self) -> EnhancementParams:
        return EnhancementParams(alpha=self.alpha, beta=self.beta)


class DepthEnhancementResult(NamedTuple):
    initial: DepthMap
    final: ImageGrid
    guidance: ImageGrid
    a_bar: ImageGrid


def glv_focus(frame: ImageGrid, fm_radius: int = 2) -> ImageGrid:
    """Gray-level variance focus measure over a (2r+1)^2 window."""
    return local_variance(frame, fm_radius)


def build_focus_volume(stack: ImageStack, params: SffParams = SffParams()) -> FocusVolume:
    return FocusVolume(np.stack([glv_focus(frame, params.fm_radius) for frame in stack]))


def aggregate_volume(volume: FocusVolume, agg_radius: int = 2) -> FocusVolume:
    """Box-mean every focus slice; radius 0 returns ``volume`` itself."""
    if agg_radius == 0:
        return volume
    if agg_radius < 0:
        raise ValueError(f"agg_radius must be >= 0, got {agg_radius}.")
    slices = [box_mean(volume[k], agg_radius) for k in range(volume.num_frames)]
    # box means of non-negative data can dip below zero by round-off
    return FocusVolume(np.maximum(np.stack(slices), 0.0))


def initial_depth(volume: FocusVolume) -> DepthMap:
    """Index of the sharpest frame per pixel; ties go to the smallest index."""
    return np.argmax(volume.scores, axis=0).astype(np.float64)


def estimate_initial_depth(stack: ImageStack, params: SffParams = SffParams()) -> DepthMap:
    """Focus volume, aggregation and argmax in one call."""
    volume = build_focus_volume(stack, params)
    return initial_depth(aggregate_volume(volume, params.agg_radius))


def guidance_image(stack: ImageStack) -> ImageGrid:
    """Mean intensity along the focus axis."""
    return np.mean(stack.frames, axis=0)


def decompose_depth(depth: DepthMap, guidance: ImageGrid, num_frames: int,
                    params: SffParams = SffParams()) -> Decomposition:
    """Decompose a frame-index depth map after normalizing it to [0, 1]."""
    guided_filter = FILTER_REGISTRY.get_filter(params.filter_name)
    if guided_filter is None:
        raise ValueError(f"unsupported filter '{params.filter_name}'.")
    scale = num_frames - 1
    return decompose(depth / scale, guidance, params.filter, guided_filter)


def reconstruct_depth(decomposition: Decomposition, num_frames: int,
                      enhancement: EnhancementParams) -> ImageGrid:
    """Amplify the detail layer and return depth in frame-index units."""
    return enhance(decomposition, enhancement) * (num_frames - 1)


def enhance_depth(stack: ImageStack, params: SffParams = SffParams()) -> DepthEnhancementResult:
    """Run the full pipeline on a focus stack.

    Returns:
        DepthEnhancementResult: ``(initial, final, guidance, a_bar)``; depth maps
        are in frame-index units, ``final`` is not clipped.
    """
    started = time.perf_counter()
    initial = estimate_initial_depth(stack, params)
    guidance = guidance_image(stack)

    decomposition = decompose_depth(initial, guidance, stack.num_frames, params)
    final = reconstruct_depth(decomposition, stack.num_frames, params.enhancement)
    logger.debug("enhance_depth: %d frames of %dx%d with %s in %.3f s",
                 stack.num_frames, stack.shape[1], stack.shape[0],
                 params.filter_name, time.perf_counter() - started)
    return DepthEnhancementResult(initial=initial, final=final,
                                  guidance=guidance, a_bar=decomposition.a_bar)
