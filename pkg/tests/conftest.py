import pytest

import numpy as np


@pytest.fixture(autouse=True)
def restore_settings():
    """Wipe settings after every test"""
    import dcunet
    from dcunet.config import DCUNetSettings

    try:
        yield
    finally:
        dcunet._settings = DCUNetSettings()
        dcunet._overwritten_settings = set()


@pytest.fixture(autouse=True)
def clear_sample_cache():
    from dcunet import datasets

    try:
        yield
    finally:
        datasets.clear_cache()


@pytest.fixture()
def float64():
    """Run a test with 64 bit tensors"""
    from dcunet import update_settings

    update_settings(FLOAT_DTYPE="float64")


@pytest.fixture(scope="session")
def synth_dataset(tmpdir_factory):
    from dcunet.datasets import MANIFEST_NAME, synth_blobs

    outdir = tmpdir_factory.mktemp("synth")
    synth_blobs(12, 32, 32, seed=0, out_dir=str(outdir))
    return outdir.join(MANIFEST_NAME)


@pytest.fixture(scope="session")
def grouped_dataset(tmpdir_factory):
    from dcunet.datasets import MANIFEST_NAME, synth_blobs

    outdir = tmpdir_factory.mktemp("grouped")
    synth_blobs(12, 32, 32, seed=1, out_dir=str(outdir), groups=4)
    return outdir.join(MANIFEST_NAME)


@pytest.fixture(scope="session")
def training_dataset(tmpdir_factory):
    from dcunet.datasets import MANIFEST_NAME, synth_blobs

    outdir = tmpdir_factory.mktemp("training")
    synth_blobs(40, 64, 64, seed=2, out_dir=str(outdir))
    return outdir.join(MANIFEST_NAME)


@pytest.fixture()
def tiny_specs():
    """All three architectures at the smallest widths they accept"""
    from dcunet import build

    return {
        "unet": build("unet", base_filters=(2, 2, 2, 2, 2)),
        "multires": build("multires", base_U=(6, 6, 6, 6, 6)),
        "dcunet": build("dcunet", base_U=(6, 6, 6, 6, 6)),
    }


def make_gray(values, depth=8):
    from dcunet.image import GrayImage

    dtype = np.uint8 if depth == 8 else np.uint16
    return GrayImage(np.asarray(values, dtype=dtype), depth)


@pytest.fixture()
def gray():
    """Factory for GrayImage objects from nested lists"""
    return make_gray
