"""PNM file format round trips."""

import io

import numpy as np
import pytest

from growthlab import imageio, render


class TestPBM:
    def test_roundtrip_bit_exact(self, tmp_path, rng):
        img = rng.random((33, 17)) < 0.4  # odd width exercises bit packing
        path = tmp_path / "img.pbm"
        imageio.write_pbm(path, img)
        assert np.array_equal(imageio.read_pbm(path), img)

    def test_roundtrip_through_file_object(self, rng):
        img = rng.random((8, 8)) < 0.5
        buf = io.BytesIO()
        imageio.write_pbm(buf, img)
        buf.seek(0)
        assert np.array_equal(imageio.read_pbm(buf), img)

    def test_header_is_standard_p4(self, tmp_path):
        img = np.zeros((4, 6), dtype=bool)
        path = tmp_path / "img.pbm"
        imageio.write_pbm(path, img)
        assert path.read_bytes().startswith(b"P4\n6 4\n")

    def test_rendered_image_roundtrip(self, tmp_path, ink):
        img = render.render_binary("F-F+F", 60, ink, 64)
        path = tmp_path / "render.pbm"
        imageio.write_pbm(path, img)
        assert np.array_equal(imageio.read_pbm(path), img)

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "img.pbm"
        path.write_bytes(b"P5\n2 2\n255\n....")
        with pytest.raises(ValueError):
            imageio.read_pbm(path)

    def test_non_2d_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            imageio.write_pbm(tmp_path / "x.pbm", np.zeros(4, dtype=bool))


class TestPGM:
    def test_roundtrip_within_quantization(self, tmp_path, rng):
        mean = rng.random((20, 20))
        path = tmp_path / "img.pgm"
        imageio.write_pgm(path, mean)
        back = imageio.read_pgm(path)
        assert np.abs(back - mean).max() <= 0.5 / 255 + 1e-12

    def test_quantized_values_roundtrip_exactly(self, tmp_path):
        mean = np.arange(256).reshape(16, 16) / 255.0
        path = tmp_path / "img.pgm"
        imageio.write_pgm(path, mean)
        assert np.array_equal(imageio.read_pgm(path), mean)

    def test_comment_lines_skipped(self):
        data = b"P5\n# a comment\n2 2\n255\n" + bytes([0, 128, 255, 64])
        back = imageio.read_pgm(io.BytesIO(data))
        assert back.shape == (2, 2)
        assert back[0, 1] == pytest.approx(128 / 255)
