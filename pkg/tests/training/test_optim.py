import pytest

import numpy as np


def test_adam_constant_gradient():
    from dcunet.training import AdamState, adam_step, make_train_config

    config = make_train_config(learning_rate=0.1)
    state = AdamState()
    params = {"w": np.array([1.0, -2.0])}
    grads = {"w": np.array([0.5, -3.0])}

    # bias correction makes every step exactly lr * sign(grad)
    for step in range(1, 4):
        params, state = adam_step(params, grads, state, config)
        np.testing.assert_allclose(params["w"], [1.0 - 0.1 * step, -2.0 + 0.1 * step])

    assert state.step == 3
    assert repr(state) == "AdamState(step=3, params=1)"


def test_adam_moments():
    from dcunet.training import AdamState, adam_step, make_train_config

    config = make_train_config(learning_rate=0.01, beta1=0.5, beta2=0.75)
    state = AdamState()
    params = {"w": np.array([0.0])}

    params, state = adam_step(params, {"w": np.array([2.0])}, state, config)
    params, state = adam_step(params, {"w": np.array([0.0])}, state, config)

    np.testing.assert_allclose(state.m["w"], [0.5])
    np.testing.assert_allclose(state.v["w"], [0.75])

    m_hat = 0.5 / (1 - 0.5**2)
    v_hat = 0.75 / (1 - 0.75**2)
    expected = -0.01 - 0.01 * m_hat / (np.sqrt(v_hat) + 1e-8)
    np.testing.assert_allclose(params["w"], [expected])


def test_adam_skips_missing_gradients():
    from dcunet.training import AdamState, adam_step, make_train_config

    params = {"a": np.ones(2), "b": np.ones(2)}
    updated, state = adam_step(
        params, {"a": np.ones(2), "b": None}, AdamState(), make_train_config()
    )

    assert updated["b"] is params["b"]
    assert "b" not in state.m
    assert np.all(updated["a"] < 1)


def test_adam_zero_learning_rate():
    from dcunet.training import AdamState, adam_step, make_train_config

    params = {"w": np.array([0.25, 0.5], dtype="float32")}
    grads = {"w": np.array([1.0, -1.0], dtype="float32")}
    updated, _ = adam_step(params, grads, AdamState(), make_train_config(learning_rate=0))
    np.testing.assert_array_equal(updated["w"], params["w"])
    assert updated["w"].dtype == np.float32


def test_adam_invalid_gradients():
    from dcunet import exceptions
    from dcunet.training import AdamState, adam_step, make_train_config

    config = make_train_config()
    state = AdamState()

    with pytest.raises(exceptions.NumericalError):
        adam_step({"w": np.ones(2)}, {"w": np.array([1.0, np.nan])}, state, config)
    assert state.step == 0

    with pytest.raises(exceptions.ShapeMismatchError):
        adam_step({"w": np.ones(2)}, {"w": np.ones(3)}, state, config)


def test_adam_updates_tensors():
    from dcunet.tensor import Tensor
    from dcunet.training import Adam, make_train_config

    w = Tensor(np.array([1.0, 1.0]), requires_grad=True, name="w")
    w.grad = np.array([1.0, -1.0])

    optimizer = Adam({"w": w}, make_train_config(learning_rate=0.5))
    optimizer.step()
    np.testing.assert_allclose(w.data, [0.5, 1.5])

    optimizer.zero_grad()
    assert w.grad is None


def test_train_config_defaults():
    from dcunet import update_settings
    from dcunet.training import TrainConfig, make_train_config

    config = make_train_config()
    assert config == TrainConfig()

    update_settings(EPOCHS=3, BATCH_SIZE=2, DEFAULT_SEED=7)
    config = make_train_config(learning_rate=None, folds=3)
    assert (config.epochs, config.batch_size, config.seed, config.folds) == (3, 2, 7, 3)


@pytest.mark.parametrize(
    "overrides",
    [
        dict(epochs=0),
        dict(learning_rate=-1),
        dict(beta1=1.0),
        dict(folds=1),
        dict(val_fraction=1.0),
        dict(epsilon=0),
    ],
)
def test_train_config_invalid(overrides):
    from dcunet import exceptions
    from dcunet.training import make_train_config

    with pytest.raises(exceptions.InvalidArgumentsError) as exc:
        make_train_config(**overrides)
    assert list(overrides)[0] in str(exc.value)
