"""Sliding-window statistics over square, border-clipped windows.

Every statistic is built from separable cumulative sums, so the cost per pixel
does not depend on the window radius. Windows that stick out of the image are
clipped and normalized by the number of pixels they actually cover.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from AWGIF_depth_tool.image_core import ImageGrid, as_grid, check_same_shape


@dataclass(frozen=True)
class WindowSpec:
    """Square window of radius ``radius``: (2r+1) x (2r+1) pixels."""
    radius: int

    def __post_init__(self):
        if isinstance(self.radius, bool) or int(self.radius) != self.radius:
            raise ValueError(f"radius must be an integer, got {self.radius!r}.")
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}.")
        object.__setattr__(self, "radius", int(self.radius))

    @property
    def size(self) -> int:
        return 2 * self.radius + 1


Window = Union[WindowSpec, int]


def _radius(window: Window) -> int:
    if isinstance(window, WindowSpec):
        return window.radius
    return WindowSpec(window).radius


def _box_sum_axis(values: np.ndarray, radius: int, axis: int) -> np.ndarray:
    """Clipped running-window sum along one axis."""
    n = values.shape[axis]
    pad_shape = list(values.shape)
    pad_shape[axis] = 1
    cum = np.concatenate(
        [np.zeros(pad_shape), np.cumsum(values, axis=axis)], axis=axis)
    idx = np.arange(n)
    hi = np.minimum(idx + radius + 1, n)
    lo = np.maximum(idx - radius, 0)
    return np.take(cum, hi, axis=axis) - np.take(cum, lo, axis=axis)


def box_sum(img: ImageGrid, window: Window) -> ImageGrid:
    """Sum of ``img`` over each clipped window (rows first, then columns)."""
    r = _radius(window)
    values = np.asarray(img, dtype=np.float64)
    return _box_sum_axis(_box_sum_axis(values, r, 0), r, 1)


def window_counts(shape, window: Window) -> ImageGrid:
    """Number of in-bounds pixels covered by the window centered at each pixel."""
    r = _radius(window)
    rows, cols = shape
    v = np.arange(rows)
    u = np.arange(cols)
    count_v = np.minimum(v + r, rows - 1) - np.maximum(v - r, 0) + 1
    count_u = np.minimum(u + r, cols - 1) - np.maximum(u - r, 0) + 1
    return np.outer(count_v, count_u).astype(np.float64)


def _shifted(img: ImageGrid):
    # Summing deviations from one sample keeps constant regions exact.
    shift = float(img.flat[0])
    return img - shift, shift


def box_mean(img: ImageGrid, window: Window) -> ImageGrid:
    """Average of ``img`` over each clipped window.

    Example:
        >>> float(box_mean(np.arange(9.0).reshape(3, 3), 1)[1, 1])
        4.0
    """
    img = as_grid(img, name="img")
    centered, shift = _shifted(img)
    return shift + box_sum(centered, window) / window_counts(img.shape, window)


def local_variance(img: ImageGrid, window: Window) -> ImageGrid:
    """Population variance E[x^2] - E[x]^2 over each clipped window, clamped at 0."""
    img = as_grid(img, name="img")
    centered, _ = _shifted(img)
    counts = window_counts(img.shape, window)
    mean = box_sum(centered, window) / counts
    mean_sq = box_sum(centered * centered, window) / counts
    return np.maximum(mean_sq - mean * mean, 0.0)


def local_covariance(a: ImageGrid, b: ImageGrid, window: Window) -> ImageGrid:
    """Covariance mu(a*b) - mu(a)*mu(b) over each clipped window.

    Raises:
        ShapeMismatchError: ``a`` and ``b`` differ in shape.
    """
    a = as_grid(a, name="a")
    b = as_grid(b, name="b")
    check_same_shape(a, b, names=("a", "b"))
    if a is b or np.array_equal(a, b):
        return local_variance(a, window)

    a_c, _ = _shifted(a)
    b_c, _ = _shifted(b)
    counts = window_counts(a.shape, window)
    mean_a = box_sum(a_c, window) / counts
    mean_b = box_sum(b_c, window) / counts
    mean_ab = box_sum(a_c * b_c, window) / counts
    return mean_ab - mean_a * mean_b


def weighted_box_mean(values: ImageGrid, weights: ImageGrid,
                      window: Window) -> ImageGrid:
    """Weight-normalized average of ``values`` over each clipped window.

    ``weights`` must be strictly positive.
    """
    values = as_grid(values, name="values")
    weights = as_grid(weights, name="weights")
    check_same_shape(values, weights, names=("values", "weights"))
    if np.any(weights <= 0):
        raise ValueError("weights must be strictly positive.")
    centered, shift = _shifted(values)
    return shift + box_sum(weights * centered, window) / box_sum(weights, window)
