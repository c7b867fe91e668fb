"""Dense tensor ops with explicit forward/backward pairs.

Everything runs in float64. There is no autograd graph: each op exposes a
forward function and a matching backward function that maps the upstream
gradient to gradients of the op's inputs. The model wires these together
by hand, which keeps every gradient individually testable against finite
differences.
"""

import numpy as np


class ShapeError(ValueError):
    """Operand shapes are incompatible."""


class SequenceTooShortError(ValueError):
    """Input has fewer positions than the window needs."""


def as_tensor(x):
    """Coerce to a float64 ndarray (the library's only numeric currency)."""
    return np.asarray(x, dtype=np.float64)


class Parameter:
    """A trainable tensor plus its gradient and Adam moment state."""

    def __init__(self, value):
        self.value = as_tensor(value)
        self.grad = np.zeros_like(self.value)
        self.m = np.zeros_like(self.value)
        self.v = np.zeros_like(self.value)
        self.step = 0

    @property
    def shape(self):
        return self.value.shape

    def zero_grad(self):
        self.grad.fill(0.0)


# ---------------------------------------------------------------------------
# matmul

def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} x {b.shape}")
    return a @ b


def matmul_backward(dout, a, b):
    """Returns (dA, dB) for out = a @ b."""
    dout = as_tensor(dout)
    return dout @ b.T, a.T @ dout


# ---------------------------------------------------------------------------
# conv1d: input [u, d], filters [f, k, d], bias [f] -> output [v, f]

def conv1d(x, filters, bias, stride=1):
    x, filters, bias = as_tensor(x), as_tensor(filters), as_tensor(bias)
    u, d = x.shape
    f, k, fd = filters.shape
    if fd != d:
        raise ShapeError(f"conv1d: input depth {d} != filter depth {fd}")
    if u < k:
        raise SequenceTooShortError(f"conv1d: sequence length {u} < kernel {k}")
    v = (u - k) // stride + 1
    # im2col: windows [v, k*d]
    idx = np.arange(v)[:, None] * stride + np.arange(k)[None, :]
    windows = x[idx].reshape(v, k * d)
    return windows @ filters.reshape(f, k * d).T + bias


def conv1d_backward(dout, x, filters, stride=1):
    """Returns (dx, dfilters, dbias) for conv1d."""
    dout = as_tensor(dout)
    u, d = x.shape
    f, k, _ = filters.shape
    v = dout.shape[0]
    idx = np.arange(v)[:, None] * stride + np.arange(k)[None, :]
    windows = x[idx].reshape(v, k * d)
    dbias = dout.sum(axis=0)
    dfilters = (dout.T @ windows).reshape(f, k, d)
    dwindows = (dout @ filters.reshape(f, k * d)).reshape(v, k, d)
    dx = np.zeros_like(x)
    np.add.at(dx, idx, dwindows)
    return dx, dfilters, dbias


# ---------------------------------------------------------------------------
# relu

def relu(x):
    return np.maximum(0.0, as_tensor(x))


def relu_backward(dout, x):
    # Subgradient at exactly 0 is taken as 0.
    return as_tensor(dout) * (x > 0)


# ---------------------------------------------------------------------------
# maxpool1d: input [v, f] -> [v', f], pooling over the sequence axis

def _pool_windows(v, pool, stride):
    vp = (v - pool) // stride + 1
    return np.arange(vp)[:, None] * stride + np.arange(pool)[None, :]


def maxpool1d(x, pool, stride):
    x = as_tensor(x)
    v = x.shape[0]
    if v < pool:
        raise SequenceTooShortError(f"maxpool1d: length {v} < pool {pool}")
    idx = _pool_windows(v, pool, stride)
    return x[idx].max(axis=1)


def maxpool1d_backward(dout, x, pool, stride):
    dout = as_tensor(dout)
    v, f = x.shape
    idx = _pool_windows(v, pool, stride)  # [v', pool]
    # np.argmax picks the first maximal index, which pins the tie rule.
    arg = x[idx].argmax(axis=1)  # [v', f]
    dx = np.zeros_like(x)
    rows = idx[np.arange(idx.shape[0])[:, None], arg]  # [v', f]
    np.add.at(dx, (rows, np.arange(f)[None, :]), dout)
    return dx


# ---------------------------------------------------------------------------
# softmax (stable, max-subtraction)

def softmax(x):
    x = as_tensor(x)
    z = x - x.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_backward(dout, probs):
    """Full Jacobian-vector product: dx = p * (dout - sum(p * dout))."""
    dout = as_tensor(dout)
    dot = (probs * dout).sum(axis=-1, keepdims=True)
    return probs * (dout - dot)


# ---------------------------------------------------------------------------
# elementwise suite

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError(f"add: shape mismatch {a.shape} vs {b.shape}")
    return a + b


def tanh(x):
    return np.tanh(as_tensor(x))


def tanh_backward(dout, out):
    return as_tensor(dout) * (1.0 - out * out)


def sigmoid(x):
    x = as_tensor(x)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_backward(dout, out):
    return as_tensor(dout) * out * (1.0 - out)


def scale(x, c):
    return as_tensor(x) * c


def concat(parts):
    """Concatenate 1-D segments into one flat vector."""
    return np.concatenate([as_tensor(p).ravel() for p in parts])


def concat_backward(dout, lengths):
    """Split the upstream gradient back into the original segments."""
    dout = as_tensor(dout)
    if dout.size != sum(lengths):
        raise ShapeError(
            f"concat_backward: gradient size {dout.size} != sum of segments {sum(lengths)}")
    out, off = [], 0
    for n in lengths:
        out.append(dout[off:off + n])
        off += n
    return out
