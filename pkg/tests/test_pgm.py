import pytest

import numpy as np


def test_encode_header(gray):
    from dcunet import pgm

    data = pgm.encode(gray([[0, 1, 2], [3, 4, 5]]))
    assert data == b"P5\n3 2\n255\n" + bytes([0, 1, 2, 3, 4, 5])


def test_encode_16bit_big_endian(gray):
    from dcunet import pgm

    data = pgm.encode(gray([[1, 256]], depth=16))
    assert data == b"P5\n2 1\n65535\n" + b"\x00\x01\x01\x00"


@pytest.mark.parametrize("depth", [8, 16])
def test_roundtrip(tmpdir, depth):
    from dcunet import pgm
    from dcunet.image import GrayImage

    rng = np.random.default_rng(0)
    dtype = "uint8" if depth == 8 else "uint16"
    pixels = rng.integers(0, 2**depth, size=(7, 5), dtype=dtype)
    img = GrayImage(pixels, depth)

    outfile = tmpdir.join("img.pgm")
    pgm.save_gray(outfile, img)
    assert pgm.load_gray(outfile) == img


def test_decode_comments():
    from dcunet import pgm

    data = b"P5\n# made by hand\n2 # width\n1\n255\n" + bytes([10, 20])
    img = pgm.decode(data)
    assert img.shape == (1, 2)
    np.testing.assert_array_equal(img.pixels, [[10, 20]])


def test_decode_small_maxval():
    from dcunet import pgm

    img = pgm.decode(b"P5 2 1 100 " + bytes([0, 100]))
    assert img.depth == 8
    np.testing.assert_array_equal(img.pixels, [[0, 100]])


@pytest.mark.parametrize(
    "data,message",
    [
        (b"P2\n1 1\n255\n\x00", "magic"),
        (b"P5\n", "Missing width"),
        (b"P5\nab 1\n255\n\x00", "Invalid width"),
        (b"P5\n0 1\n255\n", "Invalid dimensions"),
        (b"P5\n1 1\n0\n\x00", "maxval"),
        (b"P5\n1 1\n70000\n\x00\x00", "maxval"),
        (b"P5\n2 2\n255\n\x00\x00", "Truncated raster"),
        (b"P5\n2 1\n100\n\x00\xff", "exceeds maxval 100 at byte 12"),
    ],
)
def test_decode_invalid(data, message):
    from dcunet import exceptions, pgm

    with pytest.raises(exceptions.InvalidImageError) as exc:
        pgm.decode(data)
    assert message in str(exc.value)


def test_load_missing(tmpdir):
    from dcunet import exceptions, pgm

    with pytest.raises(exceptions.DataError) as exc:
        pgm.load_gray(tmpdir.join("missing.pgm"))
    assert "missing.pgm" in str(exc.value)


def test_load_invalid_names_file(tmpdir):
    from dcunet import exceptions, pgm

    outfile = tmpdir.join("bad.pgm")
    outfile.write_binary(b"P6\n1 1\n255\n\x00\x00\x00")

    with pytest.raises(exceptions.InvalidImageError) as exc:
        pgm.load_gray(outfile)
    assert "bad.pgm" in str(exc.value)
