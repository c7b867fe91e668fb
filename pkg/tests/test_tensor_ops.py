import math

import numpy as np
import pytest

from hcms import tensor as T
from conftest import assert_close, central_diff

N_TRIALS = 100


# ---------------------------------------------------------------------------
# matmul

def test_matmul_identity():
    out = T.matmul([[1, 0], [0, 1]], [[3], [4]])
    assert out.tolist() == [[3], [4]]


def test_matmul_zero():
    assert T.matmul([[1, 2]], [[0], [0]]).tolist() == [[0]]


def test_matmul_hand():
    assert T.matmul([[1, 2], [3, 4]], [[5], [6]]).tolist() == [[17], [39]]


def test_matmul_shape_error():
    with pytest.raises(T.ShapeError, match=r"\(1, 2\).*\(3, 1\)"):
        T.matmul([[1, 2]], [[1], [2], [3]])


def test_matmul_gradcheck(rng):
    for _ in range(N_TRIALS):
        a = rng.uniform(-2, 2, size=(3, 4))
        b = rng.uniform(-2, 2, size=(4, 2))
        w = rng.uniform(-1, 1, size=(3, 2))
        da, db = T.matmul_backward(w, a, b)
        assert_close(da, central_diff(lambda x: float((T.matmul(x, b) * w).sum()), a))
        assert_close(db, central_diff(lambda x: float((T.matmul(a, x) * w).sum()), b))


# ---------------------------------------------------------------------------
# conv1d

def test_conv1d_sliding_window_hand():
    x = np.array([[1.0], [2.0], [3.0], [4.0]])
    filters = np.array([[[1.0], [1.0]]])  # one filter, k=2, d=1
    out = T.conv1d(x, filters, np.zeros(1), stride=1)
    assert out.ravel().tolist() == [3, 5, 7]


def test_conv1d_zero_filters(rng):
    x = rng.normal(size=(6, 3))
    out = T.conv1d(x, np.zeros((2, 2, 3)), np.zeros(2), stride=1)
    assert np.all(out == 0)
    assert out.shape == (5, 2)


def test_conv1d_single_window():
    out = T.conv1d([[5.0]], [[[2.0]]], [1.0], stride=1)
    assert out.ravel().tolist() == [11]


def test_conv1d_too_short():
    with pytest.raises(T.SequenceTooShortError):
        T.conv1d(np.zeros((2, 1)), np.zeros((1, 3, 1)), np.zeros(1))


def test_conv1d_identity_filter_reproduces_channel(rng):
    # stride 1, kernel 1, single filter picking out one input channel
    x = rng.uniform(-2, 2, size=(7, 3))
    filters = np.zeros((1, 1, 3))
    filters[0, 0, 1] = 1.0
    out = T.conv1d(x, filters, np.zeros(1), stride=1)
    assert np.array_equal(out.ravel(), x[:, 1])


@pytest.mark.parametrize("stride", [1, 2])
def test_conv1d_gradcheck(rng, stride):
    for _ in range(N_TRIALS // 2):
        x = rng.uniform(-2, 2, size=(7, 2))
        f = rng.uniform(-2, 2, size=(3, 2, 2))
        b = rng.uniform(-2, 2, size=3)
        v = (7 - 2) // stride + 1
        w = rng.uniform(-1, 1, size=(v, 3))
        dx, df, db = T.conv1d_backward(w, x, f, stride)
        assert_close(dx, central_diff(lambda a: float((T.conv1d(a, f, b, stride) * w).sum()), x))
        assert_close(df, central_diff(lambda a: float((T.conv1d(x, a, b, stride) * w).sum()), f))
        assert_close(db, central_diff(lambda a: float((T.conv1d(x, f, a, stride) * w).sum()), b))


# ---------------------------------------------------------------------------
# relu

def test_relu_signs():
    assert T.relu([-1.0, 0.0, 2.0]).tolist() == [0, 0, 2]


def test_relu_identity_on_nonnegative(rng):
    x = rng.uniform(0, 2, size=10)
    assert np.array_equal(T.relu(x), x)


def test_relu_fractional():
    assert T.relu([-0.5, 3.25]).tolist() == [0, 3.25]


def test_relu_grad_zero_at_zero():
    assert T.relu_backward(np.ones(3), np.array([-1.0, 0.0, 1.0])).tolist() == [0, 0, 1]


def test_relu_gradcheck(rng):
    for _ in range(N_TRIALS):
        # keep away from the kink so the finite difference is valid
        x = rng.uniform(-2, 2, size=8)
        x = x[np.abs(x) > 1e-2]
        w = rng.uniform(-1, 1, size=x.shape)
        assert_close(T.relu_backward(w, x),
                     central_diff(lambda a: float((T.relu(a) * w).sum()), x))


# ---------------------------------------------------------------------------
# maxpool1d

def test_maxpool_hand():
    out = T.maxpool1d(np.array([[1.0], [3.0], [2.0], [5.0]]), pool=2, stride=2)
    assert out.ravel().tolist() == [3, 5]


def test_maxpool_identity():
    x = np.arange(8.0).reshape(4, 2)
    assert np.array_equal(T.maxpool1d(x, 1, 1), x)


def test_maxpool_tie_routes_to_first():
    x = np.array([[7.0], [7.0]])
    assert T.maxpool1d(x, 2, 2).ravel().tolist() == [7]
    dx = T.maxpool1d_backward(np.array([[1.0]]), x, 2, 2)
    assert dx.ravel().tolist() == [1, 0]


def test_maxpool_too_short():
    with pytest.raises(T.SequenceTooShortError):
        T.maxpool1d(np.zeros((1, 2)), 2, 1)


def test_maxpool_output_drawn_from_input(rng):
    for _ in range(50):
        x = rng.uniform(-2, 2, size=(6, 3))
        out = T.maxpool1d(x, 2, 2)
        assert out.max() <= x.max()
        for val in out.ravel():
            assert val in x


def test_maxpool_gradcheck(rng):
    for _ in range(N_TRIALS):
        x = rng.uniform(-2, 2, size=(6, 2))
        w = rng.uniform(-1, 1, size=(3, 2))
        dx = T.maxpool1d_backward(w, x, 2, 2)
        assert_close(dx, central_diff(lambda a: float((T.maxpool1d(a, 2, 2) * w).sum()), x))


# ---------------------------------------------------------------------------
# softmax

def test_softmax_uniform():
    assert_close(T.softmax([0.0, 0.0, 0.0]), [1 / 3] * 3, rtol=0, atol=1e-12)


def test_softmax_no_overflow():
    out = T.softmax([1000.0, 0.0])
    assert np.isfinite(out).all()
    assert out[0] == pytest.approx(1.0)
    assert out[1] == pytest.approx(0.0, abs=1e-300)


def test_softmax_hand():
    out = T.softmax(np.log([1.0, 2.0, 3.0]))
    assert_close(out, [1 / 6, 2 / 6, 3 / 6], rtol=0, atol=1e-12)


def test_softmax_sums_and_shift_invariance(rng):
    for _ in range(N_TRIALS):
        x = rng.uniform(-2, 2, size=5)
        p = T.softmax(x)
        assert abs(p.sum() - 1) < 1e-6
        assert np.abs(T.softmax(x + 17.3) - p).max() < 1e-6


def test_softmax_gradcheck(rng):
    for _ in range(N_TRIALS):
        x = rng.uniform(-2, 2, size=5)
        w = rng.uniform(-1, 1, size=5)
        dx = T.softmax_backward(w, T.softmax(x))
        assert_close(dx, central_diff(lambda a: float((T.softmax(a) * w).sum()), x))


# ---------------------------------------------------------------------------
# elementwise suite

def test_tanh_sigmoid_symmetry_points():
    assert T.tanh(np.zeros(1))[0] == 0
    assert T.sigmoid(np.zeros(1))[0] == 0.5


def test_sigmoid_hand():
    assert T.sigmoid(np.array([math.log(3)]))[0] == pytest.approx(0.75, abs=1e-12)


def test_concat_hand():
    assert T.concat([[1.0, 2.0], [3.0]]).tolist() == [1, 2, 3]


def test_add_shape_error():
    with pytest.raises(T.ShapeError):
        T.add(np.zeros(2), np.zeros(3))


def test_tanh_sigmoid_gradcheck(rng):
    for _ in range(N_TRIALS):
        x = rng.uniform(-2, 2, size=6)
        w = rng.uniform(-1, 1, size=6)
        assert_close(T.tanh_backward(w, T.tanh(x)),
                     central_diff(lambda a: float((T.tanh(a) * w).sum()), x))
        assert_close(T.sigmoid_backward(w, T.sigmoid(x)),
                     central_diff(lambda a: float((T.sigmoid(a) * w).sum()), x))


def test_concat_backward_roundtrip(rng):
    for _ in range(50):
        lengths = list(rng.integers(1, 5, size=4))
        parts = [rng.uniform(-2, 2, size=n) for n in lengths]
        flat = T.concat(parts)
        grads = T.concat_backward(flat, lengths)
        assert [len(g) for g in grads] == lengths
        assert np.array_equal(T.concat(grads), flat)


def test_concat_backward_size_error():
    with pytest.raises(T.ShapeError):
        T.concat_backward(np.zeros(3), [1, 1])
