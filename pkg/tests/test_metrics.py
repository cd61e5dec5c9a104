import io
import itertools

import pytest

import numpy as np


def all_masks(height, width):
    from dcunet.image import GrayImage

    for bits in itertools.product((0, 255), repeat=height * width):
        yield GrayImage(np.array(bits, dtype="uint8").reshape(height, width))


def random_mask(rng, shape, fraction=0.3):
    from dcunet.image import GrayImage

    return GrayImage(np.where(rng.random(shape) < fraction, 255, 0).astype("uint8"))


def test_tanimoto_equals_jaccard_exhaustive():
    from dcunet.metrics import jaccard, tanimoto

    masks = list(all_masks(2, 3))
    assert len(masks) == 64

    for a, b in itertools.product(masks, repeat=2):
        assert tanimoto(a, b) == jaccard(a, b)


def test_tanimoto_equals_jaccard_random():
    from dcunet.metrics import jaccard, tanimoto

    rng = np.random.default_rng(0)
    for _ in range(50):
        a, b = random_mask(rng, (17, 23)), random_mask(rng, (17, 23), fraction=0.6)
        assert tanimoto(a, b) == jaccard(a, b)


def test_jaccard_values(gray):
    from dcunet.metrics import jaccard

    a = gray([[255, 255, 0, 0]])
    b = gray([[0, 255, 255, 0]])
    assert jaccard(a, b) == 1 / 3
    assert jaccard(a, a) == 1.0
    assert jaccard(a, gray([[0, 0, 255, 255]])) == 0.0

    # two empty masks are identical
    assert jaccard(gray([[0, 0]]), gray([[0, 0]])) == 1.0


def test_jaccard_16bit(gray):
    from dcunet.metrics import jaccard

    a = gray([[65535, 0]], depth=16)
    assert jaccard(a, a) == 1.0


def test_jaccard_requires_binary(gray):
    from dcunet import exceptions
    from dcunet.metrics import jaccard

    with pytest.raises(exceptions.InvalidImageError) as exc:
        jaccard(gray([[0, 128]]), gray([[0, 255]]))
    assert "binarize it first" in str(exc.value)
    assert "first image" in str(exc.value)


def test_shape_mismatch(gray):
    from dcunet import exceptions
    from dcunet.metrics import AVAILABLE_MEASURES, get_measure

    a, b = gray(np.zeros((8, 8))), gray(np.zeros((8, 9)))
    for name in AVAILABLE_MEASURES:
        with pytest.raises(exceptions.InvalidImageError) as exc:
            get_measure(name)(a, b)
        assert "8x8 and 9x8" in str(exc.value)


def test_depth_mismatch(gray):
    from dcunet import exceptions
    from dcunet.metrics import mae_similarity, ssim

    a, b = gray(np.zeros((8, 8))), gray(np.zeros((8, 8)), depth=16)
    for measure in (mae_similarity, ssim):
        with pytest.raises(exceptions.InvalidImageError) as exc:
            measure(a, b)
        assert "equal depth" in str(exc.value)


def test_padding_invariance():
    from dcunet.image import GrayImage, pad
    from dcunet.metrics import jaccard, tanimoto

    rng = np.random.default_rng(1)
    a, b = random_mask(rng, (16, 16)), random_mask(rng, (16, 16))
    gray_a = GrayImage(rng.integers(0, 256, size=(16, 16), dtype="uint8"))

    for margin in (1, 5, 16):
        assert tanimoto(pad(a, margin, margin), pad(b, margin, margin)) == tanimoto(a, b)
        assert jaccard(pad(a, margin, 2 * margin), pad(b, margin, 2 * margin)) == jaccard(a, b)
        assert tanimoto(pad(gray_a, margin, 0), pad(b, margin, 0)) == tanimoto(gray_a, b)


def test_tanimoto_values(gray):
    from dcunet.metrics import tanimoto

    assert tanimoto(gray([[0, 0]]), gray([[0, 0]])) == 1.0
    assert tanimoto(gray([[0, 0]]), gray([[0, 255]])) == 0.0

    # sum ab / (sum a^2 + sum b^2 - sum ab)
    a, b = gray([[2, 1]]), gray([[1, 3]])
    assert tanimoto(a, b) == 5 / (5 + 10 - 5)


def test_mae_similarity(gray):
    from dcunet.metrics import mae_similarity

    a = gray(np.zeros((4, 4)))
    b = gray(np.full((4, 4), 255))

    assert mae_similarity(a, a) == 1.0
    assert mae_similarity(a, b) == 1 / 256
    assert mae_similarity(b, a) == mae_similarity(a, b)

    c = gray(np.zeros((4, 4)), depth=16)
    d = gray(np.full((4, 4), 65535), depth=16)
    assert mae_similarity(c, d) == 1 / 65536


def test_mae_rises_with_blank_margins():
    from dcunet.image import pad
    from dcunet.metrics import mae_similarity

    rng = np.random.default_rng(2)
    a, b = random_mask(rng, (16, 16)), random_mask(rng, (16, 16))

    values = [mae_similarity(pad(a, m, m), pad(b, m, m)) for m in (0, 4, 8)]
    assert values[0] < values[1] < values[2]


def test_transposition_invariance():
    from dcunet.image import GrayImage
    from dcunet.metrics import mae_similarity, tanimoto

    rng = np.random.default_rng(6)
    for shape in ((9, 14), (16, 16), (1, 7)):
        a = GrayImage(rng.integers(0, 256, size=shape, dtype="uint8"))
        b = GrayImage(rng.integers(0, 256, size=shape, dtype="uint8"))
        a_t, b_t = GrayImage(a.pixels.T.copy()), GrayImage(b.pixels.T.copy())

        assert mae_similarity(a_t, b_t) == mae_similarity(a, b)
        assert tanimoto(a_t, b_t) == tanimoto(a, b)


def test_ssim_changes_with_downsampling():
    from dcunet.image import downsample
    from dcunet.metrics import ssim

    rng = np.random.default_rng(7)
    a, b = random_mask(rng, (32, 32), fraction=0.4), random_mask(rng, (32, 32), fraction=0.4)

    assert ssim(downsample(a, 2), downsample(b, 2)) != ssim(a, b)


def test_ssim_identical():
    from dcunet.image import GrayImage
    from dcunet.metrics import ssim

    rng = np.random.default_rng(3)
    img = GrayImage(rng.integers(0, 256, size=(20, 24), dtype="uint8"))
    assert ssim(img, img) == 1.0

    img16 = GrayImage(rng.integers(0, 65536, size=(20, 24), dtype="uint16"), 16)
    assert ssim(img16, img16) == 1.0


def test_ssim_symmetric():
    from dcunet.image import GrayImage
    from dcunet.metrics import ssim

    rng = np.random.default_rng(4)
    a = GrayImage(rng.integers(0, 256, size=(16, 16), dtype="uint8"))
    b = GrayImage(rng.integers(0, 256, size=(16, 16), dtype="uint8"))

    value = ssim(a, b)
    assert 0.0 <= value < 1.0
    assert ssim(b, a) == value


def test_ssim_clipped_at_zero(gray):
    from dcunet.metrics import ssim

    checker = np.indices((8, 8)).sum(axis=0) % 2 * 255
    a = gray(checker)
    b = gray(255 - checker)
    assert ssim(a, b, window=2) == 0.0


def test_ssim_window(gray):
    from dcunet import exceptions, update_settings
    from dcunet.metrics import ssim

    a = gray(np.arange(36).reshape(6, 6))
    b = gray(np.arange(36).reshape(6, 6).T)

    with pytest.raises(exceptions.InvalidArgumentsError):
        ssim(a, b)  # default window of 8 exceeds the image

    with pytest.raises(exceptions.InvalidArgumentsError):
        ssim(a, b, window=0)

    update_settings(SSIM_WINDOW=3)
    assert ssim(a, b) == ssim(a, b, window=3)
    assert ssim(a, b, window=6) != ssim(a, b, window=3)


def test_otsu_threshold(gray):
    from dcunet.metrics import otsu_threshold

    assert otsu_threshold(gray([[50, 50, 200, 200]])) == 50.5
    assert otsu_threshold(gray([[10, 10, 11, 200, 201, 201]])) == 11.5


def test_otsu_threshold_translation():
    from dcunet.image import GrayImage
    from dcunet.metrics import otsu_threshold

    rng = np.random.default_rng(5)
    pixels = np.concatenate(
        [rng.normal(60, 10, size=200), rng.normal(150, 20, size=100)]
    ).clip(0, 200)
    img = GrayImage(np.rint(pixels).astype("uint8").reshape(15, 20))

    threshold = otsu_threshold(img)
    assert 60 < threshold < 150
    assert threshold % 1 == 0.5

    shifted = GrayImage(img.pixels + np.uint8(37))
    assert otsu_threshold(shifted) == threshold + 37


def test_otsu_threshold_constant(gray):
    from dcunet import exceptions
    from dcunet.metrics import otsu_threshold

    with pytest.raises(exceptions.InvalidImageError):
        otsu_threshold(gray([[3, 3], [3, 3]]))


def test_binarize(gray):
    from dcunet.metrics import binarize, otsu_binarize

    out = binarize(gray([[10, 11, 12]]), 10.5)
    np.testing.assert_array_equal(out.pixels, [[0, 255, 255]])
    assert out.depth == 8

    mask = gray([[0, 255]])
    assert otsu_binarize(mask) is mask

    np.testing.assert_array_equal(
        otsu_binarize(gray([[50, 50, 200, 200]])).pixels, [[0, 0, 255, 255]]
    )

    out16 = binarize(gray([[0, 40000]], depth=16), 20000.5)
    assert out16.depth == 8
    np.testing.assert_array_equal(out16.pixels, [[0, 255]])


def test_otsu_jaccard(gray):
    from dcunet.metrics import otsu_jaccard

    prediction = gray([[20, 30, 220, 230]])
    truth = gray([[0, 0, 255, 255]])
    assert otsu_jaccard(prediction, truth) == 1.0


def test_get_measure():
    from dcunet import exceptions, metrics

    assert metrics.get_measure("jaccard") is metrics.jaccard
    assert metrics.get_measure("jaccard", otsu=True) is metrics.otsu_jaccard
    assert metrics.get_measure("tanimoto", otsu=True) is metrics.tanimoto

    with pytest.raises(exceptions.InvalidArgumentsError):
        metrics.get_measure("dice")


def test_compare(gray):
    from dcunet.metrics import compare

    a = gray(np.where(np.eye(8) > 0, 255, 0))
    values = compare(a, a)

    assert list(values) == ["jaccard", "mae", "ssim", "tanimoto"]
    assert all(v == 1.0 for v in values.values())

    assert list(compare(a, a, measures=("tanimoto", "mae"))) == ["tanimoto", "mae"]


def test_metric_report(gray):
    from dcunet.metrics import evaluate_pairs

    a = gray([[255, 255, 0, 0]])
    b = gray([[0, 255, 255, 0]])

    report = evaluate_pairs([(a, a), (a, b)], names=["same", "shifted"], measures=("jaccard",))
    assert len(report) == 2
    assert report.mean("jaccard") == pytest.approx(2 / 3)
    assert report.std("jaccard") == pytest.approx(1 / 3)

    stream = io.StringIO()
    report.write(stream)
    assert stream.getvalue() == (
        "pair,measure,value\n"
        "same,jaccard,1.00000000\n"
        "shifted,jaccard,0.33333333\n"
        "mean,jaccard,0.66666667\n"
        "std,jaccard,0.33333333\n"
    )


def test_metric_report_invalid(gray):
    from dcunet import exceptions
    from dcunet.metrics import MetricReport, evaluate_pairs

    with pytest.raises(exceptions.InvalidArgumentsError):
        MetricReport(["dice"])

    report = MetricReport(["mae"])
    with pytest.raises(exceptions.InvalidArgumentsError):
        report.write(io.StringIO())

    with pytest.raises(exceptions.NumericalError) as exc:
        report.add("broken", {"mae": 1.5})
    assert "broken" in str(exc.value)
    assert len(report) == 0

    a = gray([[0, 255]])
    with pytest.raises(exceptions.InvalidArgumentsError):
        evaluate_pairs([(a, a)], names=["x", "y"])


def test_evaluate_pairs_default_names(gray):
    from dcunet.metrics import evaluate_pairs

    a = gray(np.full((8, 8), 255))
    report = evaluate_pairs([(a, a), (a, a)], measures=("mae",))
    assert report.pairs == ["0", "1"]
