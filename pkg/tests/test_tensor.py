import pytest

import numpy as np


def test_tensor_defaults():
    from dcunet.tensor import Tensor

    t = Tensor([[1, 2], [3, 4]])
    assert t.dtype == np.float32
    assert t.shape == (2, 2)
    assert t.ndim == 2
    assert t.is_leaf
    assert t.grad is None
    assert not t.requires_grad


def test_tensor_dtype_from_settings():
    from dcunet import update_settings
    from dcunet.tensor import Tensor

    update_settings(FLOAT_DTYPE="float64")
    assert Tensor([1, 2]).dtype == np.float64

    # float arrays keep their width
    assert Tensor(np.zeros(2, dtype="float32")).dtype == np.float32


def test_tensor_repr():
    from dcunet.tensor import Tensor

    t = Tensor(np.zeros((1, 2)), requires_grad=True, name="w")
    assert repr(t) == "Tensor 'w'(shape=(1, 2), dtype=float64, requires_grad=True)"


def test_backward_simple():
    from dcunet import ops
    from dcunet.tensor import Tensor

    x = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
    loss = ops.sum(ops.scale(x, 3.0))
    loss.backward()

    assert loss.item() == 6.0
    np.testing.assert_array_equal(x.grad, [3.0, 3.0, 3.0])


def test_backward_reused_parameter():
    from dcunet import ops
    from dcunet.tensor import Tensor

    x = Tensor(np.ones((1, 1, 2, 2)), requires_grad=True)
    loss = ops.sum(ops.add(x, ops.relu(x)))
    loss.backward()

    np.testing.assert_array_equal(x.grad, np.full((1, 1, 2, 2), 2.0))


def test_gradients_accumulate_until_zeroed():
    from dcunet import ops
    from dcunet.tensor import Tensor

    x = Tensor(np.ones(3), requires_grad=True)

    for _ in range(2):
        ops.sum(x).backward()
    np.testing.assert_array_equal(x.grad, [2.0, 2.0, 2.0])

    x.zero_grad()
    assert x.grad is None

    ops.sum(x).backward()
    np.testing.assert_array_equal(x.grad, [1.0, 1.0, 1.0])


def test_backward_ignores_frozen_inputs():
    from dcunet import ops
    from dcunet.tensor import Tensor

    x = Tensor(np.ones(3), requires_grad=True)
    frozen = Tensor(np.ones(3))

    ops.sum(ops.add(x, frozen)).backward()
    assert x.grad is not None
    assert frozen.grad is None


def test_backward_non_scalar():
    from dcunet import exceptions, ops
    from dcunet.tensor import Tensor

    x = Tensor(np.ones(3), requires_grad=True)
    with pytest.raises(exceptions.GraphError) as exc:
        ops.scale(x, 2.0).backward()
    assert "scalar root" in str(exc.value)


def test_backward_without_graph():
    from dcunet import exceptions
    from dcunet.tensor import Tensor

    with pytest.raises(exceptions.GraphError):
        Tensor(1.0, requires_grad=True).backward()


def test_backward_twice():
    from dcunet import exceptions, ops
    from dcunet.tensor import Tensor

    x = Tensor(np.ones(3), requires_grad=True)
    loss = ops.sum(ops.scale(x, 2.0))
    loss.backward()

    with pytest.raises(exceptions.GraphError) as exc:
        loss.backward()
    assert "already been differentiated" in str(exc.value)


def test_no_grad():
    from dcunet import ops
    from dcunet.tensor import Tensor, is_grad_enabled, no_grad

    x = Tensor(np.ones(3), requires_grad=True)

    with no_grad():
        assert not is_grad_enabled()
        y = ops.sum(x)

    assert is_grad_enabled()
    assert not y.requires_grad
    assert y.creator is None


def test_no_grad_restores_on_error():
    from dcunet.tensor import is_grad_enabled, no_grad

    with pytest.raises(KeyError):
        with no_grad():
            raise KeyError("foo")

    assert is_grad_enabled()


def test_non_finite_forward():
    from dcunet import exceptions, ops
    from dcunet.tensor import Tensor

    x = Tensor(np.ones(3), requires_grad=True)
    with pytest.raises(exceptions.NumericalError) as exc:
        ops.scale(x, float("inf"))
    assert "Scale" in str(exc.value)


def test_custom_function():
    from dcunet.tensor import Function, Tensor

    class Square(Function):
        def forward(self, x):
            self.x = x
            return x**2

        def backward(self, grad):
            return (2 * self.x * grad,)

    x = Tensor(np.array(3.0), requires_grad=True)
    y = Square.apply(x)
    assert y.requires_grad
    assert not y.is_leaf

    y.backward()
    assert x.grad == 6.0

    # the node is released after the backward pass
    assert y.creator.released


def test_unimplemented_function():
    from dcunet.tensor import Function, Tensor

    with pytest.raises(NotImplementedError):
        Function.apply(Tensor(1.0))
