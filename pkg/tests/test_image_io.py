from unittest.mock import patch

import numpy as np
import pytest
from PIL import Image

from AWGIF_depth_tool.image_core import ImageStack
from AWGIF_depth_tool.image_io import (
    DimensionMismatchError,
    ImageFormatError,
    ImageIOError,
    ImageNotFoundError,
    ImageWriteError,
    UnsupportedBitDepthError,
    encoding_for_path,
    load_stack,
    quantize,
    read_image,
    read_manifest,
    resolve_stack_paths,
    save_grid,
    write_manifest,
)


def write_p5(path, pixels, maxval=255):
    height, width = pixels.shape
    dtype = ">u2" if maxval > 255 else "u1"
    path.write_bytes(f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
                     + pixels.astype(dtype).tobytes())


def test_module_is_documented():
    from AWGIF_depth_tool import image_io
    assert image_io.__doc__.startswith("Grayscale PGM/PNG reading and writing")


class TestReadImage:

    @pytest.fixture(autouse=True)
    def setup_method(self, tmp_path):
        self.tmp_path = tmp_path

    def test_read_8bit_pgm(self):
        path = self.tmp_path / "a.pgm"
        write_p5(path, np.array([[0, 51], [204, 255]]))
        np.testing.assert_allclose(read_image(path), [[0.0, 0.2], [0.8, 1.0]])

    def test_read_16bit_pgm(self):
        path = self.tmp_path / "a.pgm"
        write_p5(path, np.array([[0, 65535, 13107]]), maxval=65535)
        np.testing.assert_allclose(read_image(path), [[0.0, 1.0, 0.2]])

    def test_read_ascii_pgm_with_comments(self):
        path = self.tmp_path / "a.pgm"
        path.write_text("P2\n# made by hand\n3 1\n# depth\n10\n0 5 10\n")
        np.testing.assert_allclose(read_image(path), [[0.0, 0.5, 1.0]])

    def test_read_8bit_png(self):
        path = self.tmp_path / "a.png"
        Image.fromarray(np.array([[0, 255], [51, 102]], dtype=np.uint8)).save(path)
        np.testing.assert_allclose(read_image(path), [[0.0, 1.0], [0.2, 0.4]])

    def test_read_16bit_png(self):
        path = self.tmp_path / "a.png"
        Image.fromarray(np.array([[0, 65535]], dtype=np.uint16)).save(path)
        np.testing.assert_allclose(read_image(path), [[0.0, 1.0]])

    def test_missing_file(self):
        with pytest.raises(ImageNotFoundError, match="missing.pgm"):
            read_image(self.tmp_path / "missing.pgm")

    def test_colour_png_is_rejected(self):
        path = self.tmp_path / "rgb.png"
        Image.new("RGB", (2, 2)).save(path)
        with pytest.raises(UnsupportedBitDepthError, match="rgb.png"):
            read_image(path)

    def test_unknown_suffix(self):
        path = self.tmp_path / "a.tif"
        path.write_bytes(b"II*")
        with pytest.raises(ImageFormatError):
            read_image(path)

    def test_not_a_pgm(self):
        path = self.tmp_path / "a.pgm"
        path.write_text("P6\n1 1\n255\nabc")
        with pytest.raises(ImageFormatError):
            read_image(path)

    def test_truncated_raster(self):
        path = self.tmp_path / "a.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
        with pytest.raises(ImageFormatError, match="Truncated"):
            read_image(path)

    def test_oversized_maxval(self):
        path = self.tmp_path / "a.pgm"
        path.write_text("P2\n1 1\n70000\n5\n")
        with pytest.raises(UnsupportedBitDepthError):
            read_image(path)


class TestManifest:

    @pytest.fixture(autouse=True)
    def setup_method(self, tmp_path):
        self.tmp_path = tmp_path

    def test_relative_entries_resolve_against_manifest(self):
        manifest = self.tmp_path / "stack.txt"
        manifest.write_text("# focus sweep\nb.pgm\n\na.pgm  # near\n")
        assert read_manifest(manifest) == [self.tmp_path / "b.pgm", self.tmp_path / "a.pgm"]

    def test_write_then_read_keeps_order(self):
        paths = [self.tmp_path / "frames" / name for name in ("f2.pgm", "f1.pgm")]
        manifest = self.tmp_path / "manifest.txt"
        write_manifest(paths, manifest)
        assert "frames/f2.pgm" in manifest.read_text()
        assert read_manifest(manifest) == paths

    def test_missing_manifest(self):
        with pytest.raises(ImageNotFoundError):
            read_manifest(self.tmp_path / "none.txt")


class TestLoadStack:

    @pytest.fixture(autouse=True)
    def setup_method(self, tmp_path):
        self.tmp_path = tmp_path
        for k, value in enumerate([10, 20, 30]):
            write_p5(tmp_path / f"frame_{k}.pgm", np.full((4, 5), value))

    def test_directory_is_read_in_lexicographic_order(self):
        stack = load_stack(self.tmp_path)
        assert isinstance(stack, ImageStack)
        assert stack.num_frames == 3
        assert stack.shape == (4, 5)
        np.testing.assert_allclose([frame[0, 0] for frame in stack], np.array([10, 20, 30]) / 255)

    def test_manifest_order_is_kept(self):
        manifest = self.tmp_path / "order.txt"
        manifest.write_text("frame_2.pgm\nframe_0.pgm\n")
        stack = load_stack(manifest)
        np.testing.assert_allclose([frame[0, 0] for frame in stack], np.array([30, 10]) / 255)

    def test_explicit_list(self):
        stack = load_stack([self.tmp_path / "frame_1.pgm", str(self.tmp_path / "frame_0.pgm")])
        assert stack.num_frames == 2

    def test_dimension_mismatch_names_frame(self):
        odd = self.tmp_path / "odd.pgm"
        write_p5(odd, np.zeros((5, 5)))
        with pytest.raises(DimensionMismatchError, match="frame 2 .*odd.pgm"):
            load_stack([self.tmp_path / "frame_0.pgm", odd])

    def test_missing_frame(self):
        with pytest.raises(ImageNotFoundError, match="gone.pgm"):
            load_stack([self.tmp_path / "frame_0.pgm", self.tmp_path / "gone.pgm"])

    def test_single_frame_is_rejected(self):
        with pytest.raises(ImageIOError, match="at least 2 frames"):
            load_stack([self.tmp_path / "frame_0.pgm"])

    def test_missing_source(self):
        with pytest.raises(ImageNotFoundError):
            resolve_stack_paths(self.tmp_path / "nowhere")


class TestQuantize:

    def test_min_max_normalization(self):
        codes = quantize(np.array([[1.0, 2.0, 3.0]]), 255)
        np.testing.assert_array_equal(codes, [[0, 128, 255]])
        assert codes.dtype == np.uint8

    def test_constant_grid_maps_to_zero(self):
        np.testing.assert_array_equal(quantize(np.full((2, 2), 7.0), 65535), 0)

    def test_fixed_range_clips_with_warning(self, caplog):
        codes = quantize(np.array([[-1.0, 0.5, 2.0]]), 65535, value_range=(0.0, 1.0))
        np.testing.assert_array_equal(codes, [[0, 32768, 65535]])
        assert codes.dtype == np.uint16
        assert "Clipping 2 pixels" in caplog.text

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            quantize(np.zeros((2, 2)), 255, value_range=(1.0, 1.0))


class TestSaveGrid:

    @pytest.fixture(autouse=True)
    def setup_method(self, tmp_path):
        self.tmp_path = tmp_path
        self.grid = np.linspace(0.0, 1.0, 12).reshape(3, 4)

    @pytest.mark.parametrize("name, encoding, maxval", [
        ("out.pgm", "pgm8", 255),
        ("out.pgm", "pgm16", 65535),
        ("out.png", "png8", 255),
    ])
    def test_written_image_reads_back_within_one_code(self, name, encoding, maxval):
        path = self.tmp_path / "nested" / name
        save_grid(self.grid, path, encoding=encoding, value_range=(0.0, 1.0))
        np.testing.assert_allclose(read_image(path), self.grid, atol=0.5 / maxval + 1e-12)

    def test_pgm16_header(self):
        path = self.tmp_path / "depth.pgm"
        save_grid(self.grid * 31, path, encoding="pgm16", value_range=(0.0, 31.0))
        assert path.read_bytes().startswith(b"P5\n4 3\n65535\n")

    def test_same_input_gives_identical_bytes(self):
        first, second = self.tmp_path / "a.pgm", self.tmp_path / "b.pgm"
        save_grid(self.grid, first)
        save_grid(self.grid, second)
        assert first.read_bytes() == second.read_bytes()

    def test_unknown_encoding(self):
        with pytest.raises(ValueError, match="Unknown encoding"):
            save_grid(self.grid, self.tmp_path / "a.pgm", encoding="jpeg")

    def test_write_failure(self):
        with patch("pathlib.Path.write_bytes", side_effect=PermissionError("denied")):
            with pytest.raises(ImageWriteError, match="denied"):
                save_grid(self.grid, self.tmp_path / "a.pgm")


class TestEncodingForPath:

    def test_suffixes(self):
        assert encoding_for_path("x.png") == "png8"
        assert encoding_for_path("x.png", bits=16) == "png8"
        assert encoding_for_path("x.PGM") == "pgm8"
        assert encoding_for_path("x.pgm", bits=16) == "pgm16"

    def test_unknown_suffix(self):
        with pytest.raises(ValueError):
            encoding_for_path("x.tif")
