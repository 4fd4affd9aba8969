"""Colored-noise timescales and the two-Gaussian coherence elements."""

import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpcollapse import (
    CoherenceConfig,
    ColoredNoiseModel,
    coherence_elements,
    coherence_neglect_h,
    colored_collapse_time,
    g_exponential,
    tau_colored,
    tau_white,
)
from dpcollapse.constants import HBAR
from dpcollapse.dynamics import ShortTimeValidityWarning


def test_tau_white_basics():
    assert tau_white(HBAR) == pytest.approx(1.0)
    assert math.isinf(tau_white(0.0))
    with pytest.raises(ValueError):
        tau_white(-1.0)


def test_g_white_sentinel():
    white = ColoredNoiseModel.white()
    assert white.is_white
    assert g_exponential(0.123, white) == 0.123


def test_g_frozen_value():
    # Omega_C t = 1: g = t - (1 - 1/e)/Omega_C, frozen with mpmath
    noise = ColoredNoiseModel(omega_c=1e3)
    assert g_exponential(1e-3, noise) == pytest.approx(
        0.0003678794411714423216, rel=1e-14
    )


def test_g_series_branch_continuity():
    noise = ColoredNoiseModel(omega_c=1e3)
    # just below and above the series switch at Omega_C t = 1e-4
    below = g_exponential(0.99e-7, noise)
    above = g_exponential(1.01e-7, noise)
    exact = 4.9999833333749999167e-14  # Omega_C t = 1e-5, frozen with mpmath
    assert g_exponential(1e-8, noise) == pytest.approx(exact, rel=1e-12)
    assert below < above


@settings(max_examples=200, deadline=None)
@given(
    log_w=st.floats(min_value=-3, max_value=15),
    log_t=st.floats(min_value=-12, max_value=6),
)
def test_g_bounded_by_t(log_w, log_t):
    noise = ColoredNoiseModel(omega_c=10.0**log_w)
    t = 10.0**log_t
    g = g_exponential(t, noise)
    # g < t holds exactly in reals; at Omega_C t beyond float resolution
    # the missing 1/Omega_C underflows the ulp of t, leaving g == t
    assert 0.0 < g <= t
    if noise.omega_c * t < 1e15:
        assert g < t


@settings(max_examples=100, deadline=None)
@given(
    log_de=st.floats(min_value=-45, max_value=-20),
    log_c=st.floats(min_value=-2, max_value=6),
    log_xt=st.floats(min_value=-4, max_value=4),
)
def test_colored_ordering(log_de, log_c, log_xt):
    """Cutoff drawn relative to the white-noise time (omega_c tau_white in
    [1e-2, 1e6]) so the strict orderings stay above float resolution."""
    delta_e = 10.0**log_de
    base = tau_white(delta_e)
    noise = ColoredNoiseModel(omega_c=10.0**log_c / base)
    t = 10.0**log_xt / noise.omega_c
    assert tau_colored(delta_e, t, noise) > base
    t_star = colored_collapse_time(delta_e, noise)
    assert t_star > base
    # t* actually solves g(t*) = tau_white
    assert g_exponential(t_star, noise) == pytest.approx(base, rel=1e-6)


def test_colored_converges_to_white():
    delta_e = 1e-30
    base = tau_white(delta_e)
    noise = ColoredNoiseModel(omega_c=1e6 / base)
    # the deviation equals 1/(omega_c tau_white) = 1e-6 exactly in this limit
    assert colored_collapse_time(delta_e, noise) == pytest.approx(
        base, rel=1.001e-6
    )


def test_collapse_time_decreases_with_cutoff():
    delta_e = 1e-32
    cuts = [1e2, 1e3, 1e4, 1e5]
    times = [
        colored_collapse_time(delta_e, ColoredNoiseModel(omega_c=w)) for w in cuts
    ]
    assert all(a > b for a, b in zip(times, times[1:]))


def test_tau_colored_rejects_nonpositive_t():
    with pytest.raises(ValueError):
        tau_colored(1e-30, 0.0, ColoredNoiseModel(omega_c=1e3))


def _coh(t_frac, msig2=None):
    total_mass = 1e-17
    sigma = 1e-9
    msig2 = msig2 if msig2 is not None else total_mass * sigma**2 / HBAR
    return CoherenceConfig(
        total_mass=total_mass,
        sigma=sigma,
        d=1e-7,
        delta_e=1e-32,
        t=t_frac * msig2,
    )


def test_coherence_requires_separated_packets():
    with pytest.raises(ValueError):
        CoherenceConfig(total_mass=1e-17, sigma=1e-9, d=2e-9,
                        delta_e=1e-32, t=0.0)


def test_coherence_matches_neglect_h_at_t_zero():
    """With no free evolution the full elements reduce exactly to the
    static form: (1 + e^(-d^2/2 sigma^2))^2 / norm^2."""
    cfg = _coh(0.0)
    k1, k2, k3, total = coherence_elements(cfg)
    assert total == pytest.approx(coherence_neglect_h(cfg), rel=1e-14)
    assert k1 > 0 and k2 >= 0 and k3 >= 0


def test_coherence_neglect_h_short_time():
    cfg = _coh(1e-3)
    _, _, _, total = coherence_elements(cfg)
    assert abs(total - coherence_neglect_h(cfg)) / total <= 1e-3


def test_short_time_warning():
    cfg = _coh(0.5)
    assert not cfg.in_short_time_regime
    with pytest.warns(ShortTimeValidityWarning):
        coherence_elements(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        coherence_elements(_coh(1e-4))  # no warning in the short-time regime
