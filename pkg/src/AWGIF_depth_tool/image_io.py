"""Grayscale PGM/PNG reading and writing, frame manifests and focus-stack loading.

Readers normalize samples to [0, 1]; writers quantize back to 8 or 16 bits.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from PIL import Image

from AWGIF_depth_tool.image_core import ImageGrid, ImageStack, as_grid

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

IMAGE_SUFFIXES = (".pgm", ".png")

# encoding name -> (container format, max value)
ENCODINGS = {
    "pgm8": ("pgm", 255),
    "pgm16": ("pgm", 65535),
    "png8": ("png", 255),
}


class ImageIOError(Exception):
    """Base exception for image reading and writing errors."""
    pass


class ImageNotFoundError(ImageIOError):
    """Raised when an image, directory or manifest does not exist."""
    pass


class DimensionMismatchError(ImageIOError):
    """Raised when the frames of a stack do not share one size."""
    pass


class UnsupportedBitDepthError(ImageIOError):
    """Raised for images that are not 8- or 16-bit grayscale."""
    pass


class ImageFormatError(ImageIOError):
    """Raised for malformed or unrecognised image files."""
    pass


class ImageWriteError(ImageIOError):
    """Raised when an image or manifest cannot be written."""
    pass


# --- Reading ---

def _pgm_tokens(data: bytes, count: int, start: int) -> Tuple[List[int], int]:
    """Read ``count`` integer header tokens, skipping whitespace and comments.

    Returns the tokens and the offset just past the last token.
    """
    tokens: List[int] = []
    pos = start
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        end = pos
        while end < n and data[end:end + 1].isdigit():
            end += 1
        if end == pos:
            raise ValueError("truncated or malformed header")
        tokens.append(int(data[pos:end]))
        pos = end
    return tokens, pos


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ImageFormatError(f"'{path}' is not a grayscale PGM (P2/P5) file.")
    try:
        (width, height, maxval), pos = _pgm_tokens(data, 3, 2)
    except ValueError as e:
        raise ImageFormatError(f"Malformed PGM header in '{path}': {e}") from e
    if width < 1 or height < 1:
        raise ImageFormatError(f"'{path}' has an empty raster ({width}x{height}).")
    if not 0 < maxval <= 65535:
        raise UnsupportedBitDepthError(
            f"'{path}' has maxval {maxval}; only 8- and 16-bit PGM is supported.")

    count = width * height
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raster = data[pos + 1:pos + 1 + count * dtype.itemsize]
        if len(raster) < count * dtype.itemsize:
            raise ImageFormatError(f"Truncated pixel data in '{path}'.")
        pixels = np.frombuffer(raster, dtype=dtype).astype(np.float64)
    else:
        body = b"\n".join(line.split(b"#", 1)[0] for line in data[pos:].splitlines())
        pixels = np.array(body.split()[:count], dtype=np.float64)
        if pixels.size < count:
            raise ImageFormatError(f"Truncated pixel data in '{path}'.")
    if np.any(pixels > maxval):
        raise ImageFormatError(f"'{path}' has pixel values above maxval {maxval}.")
    return pixels.reshape(height, width) / maxval


def _read_png(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            mode = img.mode
            if mode == "L":
                maxval = 255
            elif mode in ("I;16", "I;16B", "I;16L", "I"):
                maxval = 65535
            else:
                raise UnsupportedBitDepthError(
                    f"'{path}' has image mode '{mode}'; only 8- and 16-bit "
                    f"grayscale PNG is supported.")
            pixels = np.asarray(img, dtype=np.float64)
    except UnsupportedBitDepthError:
        raise
    except OSError as e:
        raise ImageFormatError(f"Failed to decode PNG '{path}': {e}") from e
    return pixels / maxval


def read_image(path: PathLike) -> ImageGrid:
    """Read one PGM or PNG grayscale image, rescaled to [0, 1] by its max value."""
    path = Path(path)
    if not path.is_file():
        raise ImageNotFoundError(f"Image file not found: '{path}'.")
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        pixels = _read_pgm(path)
    elif suffix == ".png":
        pixels = _read_png(path)
    else:
        raise ImageFormatError(
            f"Unsupported image type '{suffix}' for '{path}' (expected .pgm or .png).")
    logger.debug("Read %s (%dx%d)", path, pixels.shape[1], pixels.shape[0])
    return as_grid(pixels, name=str(path))


def read_manifest(manifest_path: PathLike) -> List[Path]:
    """Return the image paths listed in a manifest, one per line.

    Blank lines and ``#`` comments are ignored; relative paths are resolved
    against the manifest's directory.
    """
    manifest_path = Path(manifest_path)
    try:
        text = manifest_path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise ImageNotFoundError(f"Manifest not found: '{manifest_path}'.") from e
    except OSError as e:
        raise ImageIOError(f"Failed to read manifest '{manifest_path}': {e}") from e

    paths = []
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        entry_path = Path(entry)
        if not entry_path.is_absolute():
            entry_path = manifest_path.parent / entry_path
        paths.append(entry_path)
    return paths


def write_manifest(paths: Sequence[PathLike], manifest_path: PathLike) -> None:
    """Write a manifest listing ``paths`` relative to the manifest directory."""
    manifest_path = Path(manifest_path)
    lines = ["# frame order: one image per line"]
    for p in paths:
        p = Path(p)
        try:
            lines.append(p.relative_to(manifest_path.parent).as_posix())
        except ValueError:
            lines.append(str(p))
    try:
        manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise ImageWriteError(f"Failed to write manifest '{manifest_path}': {e}") from e


def resolve_stack_paths(source: Union[PathLike, Sequence[PathLike]]) -> List[Path]:
    """Expand a directory, a manifest file or an explicit list into frame paths."""
    if isinstance(source, (str, Path)):
        source = Path(source)
        if source.is_dir():
            return sorted(p for p in source.iterdir()
                          if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file())
        if source.is_file():
            return read_manifest(source)
        raise ImageNotFoundError(f"Stack source not found: '{source}'.")
    return [Path(p) for p in source]


def load_stack(source: Union[PathLike, Sequence[PathLike]]) -> ImageStack:
    """Load a multi-focus stack from a directory, a manifest or a list of paths.

    Directory entries are taken in lexicographic order; manifest order is kept
    as written.

    Raises:
        ImageNotFoundError: a listed frame or the source itself is missing.
        DimensionMismatchError: a frame differs in size from the first one.
        UnsupportedBitDepthError: a frame is not 8- or 16-bit grayscale.
    """
    paths = resolve_stack_paths(source)
    if len(paths) < 2:
        raise ImageIOError(
            f"A focus stack needs at least 2 frames, found {len(paths)} in '{source}'.")

    frames = []
    for i, path in enumerate(paths, start=1):
        frame = read_image(path)
        if frames and frame.shape != frames[0].shape:
            v0, u0 = frames[0].shape
            v, u = frame.shape
            raise DimensionMismatchError(
                f"Dimension mismatch at frame {i} '{path}': {u}x{v}, "
                f"expected {u0}x{v0} as in frame 1 '{paths[0]}'.")
        frames.append(frame)
    logger.info("Loaded %d frames of %dx%d", len(frames),
                frames[0].shape[1], frames[0].shape[0])
    return ImageStack(np.stack(frames))


# --- Writing ---

def quantize(grid: ImageGrid, maxval: int,
             value_range: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """Map ``grid`` onto integer codes 0..maxval with round-half-up.

    Without ``value_range`` the grid is min-max normalized (a constant grid maps
    to 0). Values outside a fixed range are clipped.
    """
    grid = as_grid(grid)
    if value_range is None:
        lo, hi = float(grid.min()), float(grid.max())
    else:
        lo, hi = float(value_range[0]), float(value_range[1])
        if not hi > lo:
            raise ValueError(f"Invalid value range ({lo}, {hi}): hi must exceed lo.")
    span = hi - lo
    scaled = np.zeros_like(grid) if span == 0 else (grid - lo) / span
    outside = int(np.count_nonzero((scaled < 0) | (scaled > 1)))
    if outside:
        logger.warning("Clipping %d pixels outside the range (%g, %g)", outside, lo, hi)
    scaled = np.clip(scaled, 0.0, 1.0)
    return np.floor(scaled * maxval + 0.5).astype(np.uint16 if maxval > 255 else np.uint8)


def save_grid(grid: ImageGrid, path: PathLike, encoding: str = "pgm16",
              value_range: Optional[Tuple[float, float]] = None) -> None:
    """Write a grid as binary PGM (8/16-bit) or 8-bit PNG.

    Args:
        grid: values to write.
        path: output file; missing parent directories are created.
        encoding: one of ``pgm8``, ``pgm16``, ``png8``.
        value_range: fixed (lo, hi) mapped to (0, maxval); min-max if omitted.

    Raises:
        ImageWriteError: the file cannot be written.
    """
    if encoding not in ENCODINGS:
        raise ValueError(
            f"Unknown encoding '{encoding}'. Choose from {', '.join(ENCODINGS)}.")
    container, maxval = ENCODINGS[encoding]
    codes = quantize(grid, maxval, value_range)
    path = Path(path)
    height, width = codes.shape

    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True)
        if container == "pgm":
            header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
            raster = codes.astype(">u2" if maxval > 255 else "u1").tobytes()
            path.write_bytes(header + raster)
        else:
            Image.fromarray(codes.astype(np.uint8)).save(path, format="PNG")
    except OSError as e:
        raise ImageWriteError(f"Failed to write image to {path}: {e}") from e
    logger.debug("Wrote %s (%s, %dx%d)", path, encoding, width, height)


def encoding_for_path(path: PathLike, bits: int = 8) -> str:
    """Pick an encoding from the file suffix (PNG is always 8-bit)."""
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        return "png8"
    if suffix == ".pgm":
        return "pgm16" if bits == 16 else "pgm8"
    raise ValueError(f"Cannot infer an image encoding from '{path}'.")
