import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from conftest import EV, REF_MASS
from evanescent.scales import CONSTANTS, ScaleParams, log_suppression
from evanescent.schrodinger import transmission_rectangular
from evanescent.wkb import BarrierProfile, read_profile, wkb_action, wkb_log_transmission

HBAR = CONSTANTS.hbar


def test_flat_barrier_matches_closed_form():
    d = 3e-11
    prof = BarrierProfile.flat(0.7 * EV + 0.2 * EV, d, REF_MASS)
    res = wkb_action(prof, 0.2 * EV)
    assert res.action == pytest.approx(math.sqrt(2 * REF_MASS * 0.7 * EV) * d / HBAR, rel=1e-14)
    assert res.log_amplitude == -res.action
    assert res.turning_points == [0.0, d]
    assert not res.includes_prefactor


def test_no_forbidden_region():
    prof = BarrierProfile.flat(EV, 1e-11, REF_MASS)
    res = wkb_action(prof, 2 * EV)
    assert res.action == 0.0 and res.log_amplitude == 0.0 and res.turning_points == []
    samples = BarrierProfile.from_arrays([0, 1e-11, 2e-11], [0, EV, 0], REF_MASS)
    assert wkb_action(samples, 1.5 * EV).action == 0.0
    assert wkb_log_transmission(prof, 2 * EV) == 0.0


def test_triangular_barrier_against_quadrature():
    v0, a = EV, 1e-11
    # independent oracle: adaptive quadrature of the analytic integrand
    oracle, _ = integrate.quad(lambda x: math.sqrt(2 * REF_MASS * v0 * (1 - x / a)) / HBAR, 0, a,
                               epsabs=0, epsrel=1e-13)
    assert oracle == pytest.approx(1.131625629155508, rel=1e-12)
    x = np.linspace(0, a, 7)
    res = wkb_action(BarrierProfile.from_arrays(x, v0 * (1 - x / a), REF_MASS), 0.0)
    assert res.action == pytest.approx(oracle, rel=1e-8)
    assert res.turning_points[0] == 0.0


def test_sampled_turning_points_interpolated():
    x = np.array([0.0, 1.0, 2.0, 3.0, 4.0]) * 1e-11
    v = np.array([0.0, 2.0, 2.0, 2.0, 0.0]) * EV
    res = wkb_action(BarrierProfile.from_arrays(x, v, REF_MASS), 1.0 * EV)
    assert res.turning_points == pytest.approx([0.5e-11, 3.5e-11], rel=1e-12)


def test_smooth_profile_converges():
    # Gaussian barrier against scipy quadrature between brentq turning points
    v0, w, e = 2 * EV, 2e-11, 0.5 * EV
    f = lambda x: v0 * math.exp(-(x / w) ** 2)  # noqa: E731
    xt = w * math.sqrt(math.log(v0 / e))
    oracle, _ = integrate.quad(lambda x: math.sqrt(2 * REF_MASS * max(f(x) - e, 0)) / HBAR,
                               -xt, xt, epsrel=1e-12, limit=200)
    x = np.linspace(-5 * w, 5 * w, 20001)
    res = wkb_action(BarrierProfile.from_arrays(x, v0 * np.exp(-(x / w) ** 2), REF_MASS), e)
    assert res.action == pytest.approx(oracle, rel=1e-6)
    assert res.turning_points == pytest.approx([-xt, xt], rel=1e-8)


def test_log_transmission_convention():
    e = 0.1 * EV
    kappa = math.sqrt(2 * REF_MASS * EV) / HBAR
    prof = BarrierProfile.flat(EV + e, 1 / kappa, REF_MASS)
    assert wkb_log_transmission(prof, e) == pytest.approx(-2.0, rel=1e-14)


@pytest.mark.parametrize("kd", [5, 10, 20, 30])
@pytest.mark.parametrize("efrac", [0.05, 0.1, 0.2])
def test_wkb_vs_exact_rectangular(kd, efrac):
    v = EV
    e = efrac * v
    kappa = math.sqrt(2 * REF_MASS * (v - e)) / HBAR
    prof = BarrierProfile.flat(v, kd / kappa, REF_MASS)
    exact = transmission_rectangular(e, v, kd / kappa, REF_MASS).log_transmission
    approx = wkb_log_transmission(prof, e)
    assert abs(exact - approx) / (2 * kd) <= 0.1


def test_profile_validation():
    with pytest.raises(ValueError):
        BarrierProfile(mass=REF_MASS)
    with pytest.raises(ValueError):
        BarrierProfile(mass=REF_MASS, segments=((0, 1, 1), (0.5, 2, 1)))
    with pytest.raises(ValueError):
        BarrierProfile(mass=REF_MASS, samples=((0, 1), (0, 2)))
    with pytest.raises(ValueError):
        BarrierProfile(mass=REF_MASS, segments=((1, 1, 1),))
    with pytest.raises(ValueError):
        wkb_action(BarrierProfile.flat(EV, 1e-11, REF_MASS), math.inf)


def test_read_profile(tmp_path):
    path = tmp_path / "barrier.txt"
    path.write_text("# x [m]  V [eV]\n0 0\n1e-11 1.0\n2e-11 0  # trailing comment\n")
    prof = read_profile(path, REF_MASS)
    assert prof.samples[1] == (1e-11, pytest.approx(EV))
    assert prof.max_potential == pytest.approx(EV)


widths = st.floats(1e-12, 1e-10)
heights = st.floats(0.01, 10.0)


@given(heights, widths, st.floats(0.05, 0.95))
def test_split_segment_additivity(h, w, frac):
    one = BarrierProfile.flat(h * EV, w, REF_MASS)
    two = BarrierProfile(mass=REF_MASS, segments=((0, frac * w, h * EV), (frac * w, w, h * EV)))
    r1, r2 = wkb_action(one, 0.0), wkb_action(two, 0.0)
    assert r2.action == pytest.approx(r1.action, rel=1e-13)
    assert r2.turning_points == pytest.approx(r1.turning_points)


@given(st.lists(st.floats(0.0, 5.0), min_size=3, max_size=12), st.floats(0.0, 2.0),
       st.floats(0.0, 2.0))
def test_raising_potential_never_lowers_action(vals, bump, e):
    x = np.linspace(0, 1e-10, len(vals))
    v = np.array(vals) * EV
    low = wkb_action(BarrierProfile.from_arrays(x, v, REF_MASS), e * EV).action
    high = wkb_action(BarrierProfile.from_arrays(x, v + bump * EV, REF_MASS), e * EV).action
    assert high >= low * (1 - 1e-12)


@given(heights, widths, st.floats(0.0, 0.99))
def test_flat_matches_log_suppression(h, w, efrac):
    e = efrac * h * EV
    res = wkb_action(BarrierProfile.flat(h * EV, w, REF_MASS), e)
    ref = log_suppression(ScaleParams(REF_MASS, h * EV - e, w))
    assert res.log_amplitude == pytest.approx(ref, rel=1e-14)
