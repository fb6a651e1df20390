"""Dense scalar containers shared by every stage of the depth pipeline.

Grids are plain ``float64`` numpy arrays of shape ``(V, U)``: the row index
is ``v`` and the column index is ``u``. Intensities and normalized depth live
in [0, 1]; depth maps in frame-index units live in [0, K-1].
"""

from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

import numpy as np

# Type aliases used in signatures across the package.
ImageGrid = np.ndarray
DepthMap = np.ndarray


class InvalidImageError(ValueError):
    """Raised when an array does not satisfy the image grid contract."""
    pass


class ShapeMismatchError(InvalidImageError):
    """Raised when grids that must be aligned have different dimensions."""
    pass


def as_grid(values, name: str = "grid") -> ImageGrid:
    """Return ``values`` as a finite 2-D float64 array, validating the contract."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidImageError(f"{name} must be 2-D, got shape {arr.shape}.")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidImageError(f"{name} must have at least one pixel.")
    if not np.all(np.isfinite(arr)):
        raise InvalidImageError(f"{name} contains NaN or Inf values.")
    return arr


def check_same_shape(first: np.ndarray, second: np.ndarray,
                     names: Tuple[str, str] = ("first", "second")) -> None:
    if first.shape != second.shape:
        raise ShapeMismatchError(
            f"{names[0]} has shape {first.shape} but {names[1]} has shape "
            f"{second.shape}."
        )


def _read_only(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ImageStack:
    """K co-registered grayscale frames, stored as a read-only (K, V, U) array."""
    frames: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.frames, dtype=np.float64)
        if arr.ndim != 3:
            raise InvalidImageError(
                f"An image stack must be 3-D (K, V, U), got shape {arr.shape}.")
        if arr.shape[0] < 2:
            raise InvalidImageError(
                f"An image stack needs at least 2 frames, got {arr.shape[0]}.")
        if arr.shape[1] < 1 or arr.shape[2] < 1:
            raise InvalidImageError("Stack frames must have at least one pixel.")
        if not np.all(np.isfinite(arr)):
            raise InvalidImageError("Image stack contains NaN or Inf values.")
        object.__setattr__(self, "frames", _read_only(arr))

    @classmethod
    def from_frames(cls, frames: Sequence[np.ndarray]) -> "ImageStack":
        """Build a stack from individual grids, reporting the first misfit frame."""
        grids = [as_grid(frame, name=f"frame {i + 1}") for i, frame in enumerate(frames)]
        if len(grids) < 2:
            raise InvalidImageError(
                f"An image stack needs at least 2 frames, got {len(grids)}.")
        for i, grid in enumerate(grids[1:], start=2):
            check_same_shape(grids[0], grid, names=("frame 1", f"frame {i}"))
        return cls(np.stack(grids))

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        """Frame shape as (V, U)."""
        return (int(self.frames.shape[1]), int(self.frames.shape[2]))

    def __len__(self) -> int:
        return self.num_frames

    def __getitem__(self, k: int) -> ImageGrid:
        return self.frames[k]

    def __iter__(self) -> Iterator[ImageGrid]:
        return iter(self.frames)


@dataclass(frozen=True, eq=False)
class FocusVolume:
    """Per-pixel focus scores for every frame, shape (K, V, U), all >= 0."""
    scores: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[0] < 2:
            raise InvalidImageError(
                f"A focus volume must be (K, V, U) with K >= 2, got {arr.shape}.")
        if not np.all(np.isfinite(arr)):
            raise InvalidImageError("Focus volume contains NaN or Inf values.")
        if np.any(arr < 0):
            raise InvalidImageError("Focus scores must be non-negative.")
        object.__setattr__(self, "scores", _read_only(arr))

    @property
    def num_frames(self) -> int:
        return int(self.scores.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.scores.shape[1]), int(self.scores.shape[2]))

    def __getitem__(self, k: int) -> ImageGrid:
        return self.scores[k]
