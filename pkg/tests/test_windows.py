import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from dnlfm_isac.errors import ParameterError
from dnlfm_isac.windows import (
    WindowKind,
    WindowSpec,
    make_window,
    mismatch_loss_db,
    sqrt_split,
    v2_antiderivatives,
    v2_density,
)

ALL_WINDOWS = [
    WindowSpec("rectangular"),
    WindowSpec("hann"),
    WindowSpec("hamming"),
    WindowSpec("blackman"),
    WindowSpec(WindowKind.COSINE_ALPHA, 0.7),
]


def cosine_alpha_loss_db(alpha):
    # periodic window alpha - (1 - alpha) cos: sum w = L alpha, sum w^2 = L (alpha^2 + (1 - alpha)^2 / 2)
    return 10 * np.log10((alpha**2 + 0.5 * (1 - alpha) ** 2) / alpha**2)


@pytest.mark.parametrize("length", [32, 256, 1024])
@pytest.mark.parametrize("kind,alpha", [("hamming", 0.54), ("hann", 0.5), ("cosine_alpha", 0.8)])
def test_mismatch_loss_matches_closed_form(kind, alpha, length):
    spec = WindowSpec(kind, alpha) if kind == "cosine_alpha" else WindowSpec(kind)
    assert mismatch_loss_db(make_window(spec, length)) == pytest.approx(cosine_alpha_loss_db(alpha), abs=1e-12)


def test_hamming_1024_value():
    assert mismatch_loss_db(make_window(WindowSpec("hamming"), 1024)) == pytest.approx(1.345, abs=0.01)


def test_rect_loss_is_zero():
    assert mismatch_loss_db(make_window(WindowSpec("rectangular"), 64)) == 0.0


def test_all_zero_window_rejected():
    with pytest.raises(ParameterError):
        mismatch_loss_db(np.zeros(8))


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.integers(2, 64), elements=st.floats(0.0, 1.0)))
def test_mismatch_loss_nonnegative_zero_iff_constant(w):
    if not np.any(w > 0):
        return
    loss = mismatch_loss_db(w)
    assert loss >= 0.0
    if np.ptp(w) == 0:
        assert loss == 0.0
    elif np.ptp(w) / w.max() > 1e-3:
        assert loss > 0.0


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, st.integers(2, 64), elements=st.floats(0.01, 1.0)),
    st.floats(1e-3, 1e3),
)
def test_mismatch_loss_scale_invariant(w, c):
    assert mismatch_loss_db(c * w) == pytest.approx(mismatch_loss_db(w), abs=1e-9)


@pytest.mark.parametrize("spec", ALL_WINDOWS, ids=lambda s: s.label())
@pytest.mark.parametrize("length", [8, 33, 256])
def test_window_shape(spec, length):
    w = make_window(spec, length).coefficients
    assert w.shape == (length,)
    assert np.all(w >= 0)
    assert w.max() == pytest.approx(1.0)
    # periodic symmetry w[n] = w[L - n]; for even L the peak sits on n = L/2
    n = np.arange(length)
    np.testing.assert_allclose(w[(length - n) % length], w, atol=1e-14)
    if length % 2 == 0:
        assert w[length // 2] == 1.0


def test_hann_matches_numpy_periodic():
    L = 64
    ref = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(L) / L)
    np.testing.assert_allclose(make_window(WindowSpec("hann"), L).coefficients, ref, atol=1e-15)


def test_sqrt_split_squares_back():
    w = make_window(WindowSpec("hamming"), 128)
    np.testing.assert_allclose(sqrt_split(w).coefficients ** 2, w.coefficients, atol=1e-15)


def test_parse_and_validation():
    assert WindowSpec.parse("cosine_alpha:0.6") == WindowSpec(WindowKind.COSINE_ALPHA, 0.6)
    assert WindowSpec.parse("hann").kind is WindowKind.HANN
    with pytest.raises(ParameterError):
        WindowSpec(WindowKind.COSINE_ALPHA, 0.3)
    with pytest.raises(ParameterError):
        WindowSpec("kaiser")
    with pytest.raises(ParameterError):
        make_window(WindowSpec("hann"), 1)


def test_hann_hamming_are_cosine_alpha_members():
    for kind, alpha in (("hann", 0.5), ("hamming", 0.54)):
        np.testing.assert_allclose(
            make_window(WindowSpec(kind), 100).coefficients,
            make_window(WindowSpec(WindowKind.COSINE_ALPHA, alpha), 100).coefficients,
        )


@pytest.mark.parametrize("spec", ALL_WINDOWS, ids=lambda s: s.label())
def test_antiderivatives_against_quadrature(spec):
    B = 61.44e6
    v2 = v2_density(spec, B)
    I1, I2 = v2_antiderivatives(spec, B)
    assert I1(-B / 2) == 0.0 and I2(-B / 2) == 0.0
    for f in np.linspace(-B / 2, B / 2, 9):
        i1, _ = quad(lambda u: float(v2(u)), -B / 2, f, epsabs=0, epsrel=1e-13)
        assert float(I1(f)) == pytest.approx(i1, rel=1e-10, abs=1e-6)
        i2, _ = quad(lambda u: float(I1(u)), -B / 2, f, epsabs=0, epsrel=1e-13)
        assert float(I2(f)) == pytest.approx(i2, rel=1e-10, abs=1e-6)


def test_density_peaks_at_centre():
    B = 1.0
    v2 = v2_density(WindowSpec("hamming"), B)
    assert v2(0.0) == pytest.approx(1.0)
    assert v2(0.5) == pytest.approx(0.08)
