"""Depth-map quality metrics: RMSE and CORR against ground truth, RMSD against
the initial map."""

import numpy as np

from AWGIF_depth_tool.image_core import ImageGrid, as_grid, check_same_shape


class MetricError(ValueError):
    """Raised when a metric is undefined for the given maps."""
    pass


def _pair(first: ImageGrid, second: ImageGrid, names):
    first = as_grid(first, name=names[0])
    second = as_grid(second, name=names[1])
    check_same_shape(first, second, names=names)
    return first, second


def rmse(Zf: ImageGrid, Zg: ImageGrid) -> float:
    """Root-mean-square error between an estimated and a ground-truth map."""
    Zf, Zg = _pair(Zf, Zg, ("estimate", "ground truth"))
    diff = Zf - Zg
    return float(np.sqrt(np.mean(diff * diff)))


def corr(Zf: ImageGrid, Zg: ImageGrid) -> float:
    """Pearson correlation of two maps, in [-1, 1].

    Raises:
        MetricError: either map is constant.
    """
    Zf, Zg = _pair(Zf, Zg, ("estimate", "ground truth"))
    if np.ptp(Zf) == 0 or np.ptp(Zg) == 0:
        raise MetricError("Correlation is undefined for a constant depth map.")
    df = Zf - Zf.mean()
    dg = Zg - Zg.mean()
    value = np.sum(df * dg) / np.sqrt(np.sum(df * df) * np.sum(dg * dg))
    return float(np.clip(value, -1.0, 1.0))


def rmsd(Zf: ImageGrid, Z_initial: ImageGrid) -> float:
    """Root-mean-square difference between an enhanced and the initial map."""
    Zf, Z_initial = _pair(Zf, Z_initial, ("enhanced", "initial"))
    diff = Zf - Z_initial
    return float(np.sqrt(np.mean(diff * diff)))
