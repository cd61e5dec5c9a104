import struct

import pytest

import numpy as np


def test_roundtrip_keeps_order():
    from dcunet import checkpoint

    arrays = {
        "b/weight": np.arange(6, dtype="float32").reshape(1, 2, 3),
        "a/bias": np.array([0.5, -1.5], dtype="float32"),
        "scalar": np.array(2.0, dtype="float32"),
    }
    out = checkpoint.loads(checkpoint.dumps(arrays))

    assert list(out) == ["b/weight", "a/bias", "scalar"]
    for name, arr in arrays.items():
        assert out[name].dtype == np.float32
        np.testing.assert_array_equal(out[name], arr)


def test_layout():
    from dcunet import checkpoint

    payload = checkpoint.dumps({"w": np.zeros((2, 3))})
    assert payload[:4] == b"DCUN"
    assert struct.unpack("<BI", payload[4:9]) == (1, 1)
    assert len(payload) == 4 + 5 + 2 + 1 + 1 + 2 * 4 + 6 * 4


def test_float64_is_stored_as_float32():
    from dcunet import checkpoint

    arr = np.array([1 / 3], dtype="float64")
    out = checkpoint.loads(checkpoint.dumps({"x": arr}))
    assert out["x"][0] == np.float32(1 / 3)


@pytest.mark.parametrize(
    "mutate,message",
    [
        (lambda p: b"XXXX" + p[4:], "magic"),
        (lambda p: p[:4] + b"\x02" + p[5:], "Unsupported checkpoint version 2 at byte 4"),
        (lambda p: p[:-1], "payload of w at byte 21"),
        (lambda p: p[:7], "header at byte 4"),
        (lambda p: p + b"\x00", "1 unexpected trailing bytes"),
    ],
)
def test_invalid(mutate, message):
    from dcunet import checkpoint, exceptions

    payload = checkpoint.dumps({"w": np.zeros((2, 3))})
    with pytest.raises(exceptions.InvalidCheckpointError) as exc:
        checkpoint.loads(mutate(payload))
    assert message in str(exc.value)


def test_duplicate_record():
    from dcunet import checkpoint, exceptions

    record = checkpoint.dumps({"a": np.ones(2)})[9:]
    payload = checkpoint.MAGIC + struct.pack("<BI", checkpoint.VERSION, 2) + record + record

    with pytest.raises(exceptions.InvalidCheckpointError) as exc:
        checkpoint.loads(payload)
    assert "Duplicate record a" in str(exc.value)


def test_load_missing(tmp_path):
    from dcunet import checkpoint, exceptions

    with pytest.raises(exceptions.InvalidCheckpointError):
        checkpoint.load(tmp_path / "missing.ckpt")


def test_model_roundtrip(tmp_path, tiny_specs):
    from dcunet.architectures.model import Model

    spec = tiny_specs["dcunet"]
    model = Model(spec, seed=0)
    model.bn_states["block1/bn"].moving_mean[:] = 0.25

    outfile = tmp_path / "model.ckpt"
    model.save(outfile)

    restored = Model(spec, seed=1)
    restored.load(outfile)

    original = model.state_dict()
    assert list(restored.state_dict()) == list(original)
    for name, arr in restored.state_dict().items():
        np.testing.assert_array_equal(arr, original[name])

    assert all(state.populated for state in restored.bn_states.values())


def test_model_load_mismatch(tmp_path, tiny_specs):
    from dcunet import exceptions
    from dcunet.architectures.model import Model

    outfile = tmp_path / "model.ckpt"
    Model(tiny_specs["dcunet"], seed=0).save(outfile)

    with pytest.raises(exceptions.InvalidCheckpointError) as exc:
        Model(tiny_specs["multires"], seed=0).load(outfile)
    assert "does not match multires" in str(exc.value)


def test_model_load_shape_mismatch(tmp_path):
    from dcunet import build, exceptions
    from dcunet.architectures.model import Model

    outfile = tmp_path / "model.ckpt"
    Model(build("unet", base_filters=(2, 2, 2, 2, 2)), seed=0).save(outfile)

    with pytest.raises(exceptions.InvalidCheckpointError) as exc:
        Model(build("unet", base_filters=(2, 2, 2, 2, 4)), seed=0).load(outfile)
    assert "Shape mismatch" in str(exc.value)
