import numpy as np
import pytest


def central_diff(fn, x, h=1e-4):
    """Central finite-difference gradient of scalar fn w.r.t. array x."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        old = x[idx]
        x[idx] = old + h
        fp = fn(x)
        x[idx] = old - h
        fm = fn(x)
        x[idx] = old
        grad[idx] = (fp - fm) / (2 * h)
    return grad


def assert_close(analytic, numeric, rtol=1e-3, atol=1e-7):
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    denom = np.maximum(np.abs(numeric), np.abs(analytic))
    err = np.abs(analytic - numeric)
    ok = err <= atol + rtol * denom
    assert ok.all(), (
        f"gradient mismatch: max abs err {err.max()}, "
        f"worst at {np.unravel_index(err.argmax(), err.shape)}: "
        f"analytic {analytic[np.unravel_index(err.argmax(), err.shape)]} vs "
        f"numeric {numeric[np.unravel_index(err.argmax(), err.shape)]}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
