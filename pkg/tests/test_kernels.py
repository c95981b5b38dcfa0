"""Backend parity between compiled and numpy kernels."""

import numpy as np
import pytest

from faar.kernels import HAS_COMPILED, band_magnitudes, timedomain_features


def test_numpy_backend_shapes(rng):
    wins = rng.normal(size=(24, 250))
    out = timedomain_features(wins, backend="numpy")
    assert out.shape == (24, 4)
    assert np.isfinite(out).all()


def test_band_magnitudes_matches_scalar(rng):
    from faar.features import band_magnitude

    wins = rng.normal(size=(6, 250))
    out = band_magnitudes(wins, 250.0, 8, 32)
    for r in range(6):
        assert out[r] == pytest.approx(band_magnitude(wins[r], 250.0, 8, 32), rel=1e-12)


def test_flat_window_features():
    wins = np.full((2, 100), 5.0)
    out = timedomain_features(wins, backend="numpy")
    assert (out[:, 0] == pytest.approx(5.0))  # rms
    assert (out[:, 1] == 0.0).all()  # max_grad
    assert (out[:, 2] == 0.0).all()  # zcr
    assert np.isinf(out[:, 3]).all()  # kurt sentinel


def test_timedomain_matches_scalar_ops(rng):
    from faar.features import kurtosis, max_gradient, rms, zero_crossing_rate

    wins = rng.normal(size=(10, 128))
    out = timedomain_features(wins, backend="numpy")
    for r in range(10):
        assert out[r, 0] == pytest.approx(rms(wins[r]), rel=1e-12)
        assert out[r, 1] == pytest.approx(max_gradient(wins[r]), rel=1e-12)
        assert out[r, 2] == pytest.approx(zero_crossing_rate(wins[r]), rel=1e-12)
        assert out[r, 3] == pytest.approx(kurtosis(wins[r]), rel=1e-12)


def test_unknown_backend(rng):
    with pytest.raises(ValueError):
        timedomain_features(rng.normal(size=(2, 32)), backend="fortran")


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled extension not built")
def test_backend_parity(rng):
    wins = rng.normal(size=(48, 250)) * 20.0
    a = timedomain_features(wins, backend="numpy")
    b = timedomain_features(wins, backend="cython")
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled extension not built")
def test_backend_parity_flat_and_extreme(rng):
    wins = rng.normal(size=(12, 128))
    wins[0] = 0.0
    wins[1] = 7.0
    wins[2] *= 1e8
    wins[3] *= 1e-8
    a = timedomain_features(wins, backend="numpy")
    b = timedomain_features(wins, backend="cython")
    assert np.array_equal(np.isinf(a), np.isinf(b))
    m = np.isfinite(a)
    np.testing.assert_allclose(a[m], b[m], rtol=1e-10, atol=1e-14)
