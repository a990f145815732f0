import math
import warnings

import pytest
from hypothesis import given, strategies as st

from qfriction import scales
from qfriction.constants import HBAR, KB
from qfriction.errors import DomainError
from qfriction.friction import residual_friction
from qfriction.scales import (INFINITE, DimensionlessState, MassRatioWarning,
                              ParticleGasSystem, derive_scales, from_dimensionless,
                              to_dimensionless)

H_MASS = 1.6735e-27
positive = st.floats(1e-6, 1e6)


def test_mean_free_path():
    assert scales.mean_free_path(1, 1) == 1
    assert scales.mean_free_path(2e-19, 1e25) == pytest.approx(5e-7, rel=1e-15)
    assert scales.mean_free_path(1.3, 2.0) / scales.mean_free_path(2.6, 2.0) == 2


@pytest.mark.parametrize("sigma,n", [(0, 1), (1, -1), (-1, 1)])
def test_mean_free_path_domain(sigma, n):
    with pytest.raises(DomainError):
        scales.mean_free_path(sigma, n)


def test_thermal_de_broglie():
    assert scales.thermal_de_broglie(2.0, 4.0, hbar=1, kB=1) / \
        scales.thermal_de_broglie(2.0, 1.0, hbar=1, kB=1) == 0.5
    assert scales.thermal_de_broglie(1.0, 0.0) is INFINITE
    assert scales.is_infinite(scales.thermal_de_broglie(1.0, 0.0))
    # hand calculation: 1.0546e-34 / (2 sqrt(1.6735e-27 * 1.380649e-23 * 1.33))
    assert scales.thermal_de_broglie(H_MASS, 1.33) == pytest.approx(3.0159e-10, rel=1e-3)
    with pytest.raises(DomainError):
        scales.thermal_de_broglie(1.0, -1.0)


def test_characteristic_temperature():
    # (1.054571817e-34)^2 / (4 * 1.6735e-27 * 9e-20 * 1.380649e-23) = 1.33703 K
    assert scales.characteristic_temperature(H_MASS, 3e-10) == pytest.approx(1.33703, rel=1e-5)
    assert scales.characteristic_temperature(1, 1, hbar=1, kB=1) / \
        scales.characteristic_temperature(1, 2, hbar=1, kB=1) == 4
    t = scales.characteristic_temperature(H_MASS, 3e-10)
    assert t * (3e-10) ** 2 * 4 * H_MASS * KB / HBAR**2 == pytest.approx(1, rel=1e-15)


def test_collision_time_residual():
    # 1.6735e-27 * 9e-20 / 1.054571817e-34 = 1.42821e-12 s
    assert scales.collision_time_residual(H_MASS, 3e-10) == pytest.approx(1.42821e-12, rel=1e-5)
    assert scales.collision_time_residual(2.0, 1.5) / scales.collision_time_residual(1.0, 1.5) == 2
    lam = 3e-10
    tau = scales.collision_time_residual(H_MASS, lam)
    assert tau * residual_friction(lam).b / H_MASS == pytest.approx(1, rel=1e-15)


def test_derive_scales_hydrogen(hydrogen):
    sc = derive_scales(hydrogen)
    assert sc.mfp == pytest.approx(3e-10, rel=1e-12)
    assert sc.T_lambda == pytest.approx(1.33, rel=0.01)
    assert sc.tau_residual == pytest.approx(1.43e-12, rel=0.01)
    assert sc.thermal_wavelength is INFINITE
    assert sc.b_residual == pytest.approx(1.17e-15, rel=0.01)


@given(positive, positive, positive, st.floats(0, 1e4))
def test_scale_identities(m, sigma, n, T):
    system = ParticleGasSystem(m, 20 * m, sigma, n, T)
    sc = derive_scales(system, hbar=1.0, kB=1.0)
    assert sc.mfp == 1.0 / (sigma * n)
    assert sc.T_lambda * sc.mfp**2 * 4 * m == pytest.approx(1.0, rel=1e-13)
    at_crossover = scales.thermal_de_broglie(m, sc.T_lambda, hbar=1.0, kB=1.0)
    assert at_crossover == pytest.approx(sc.mfp, rel=1e-12)


@given(positive, positive)
def test_scale_monotonicity(a, b):
    lo, hi = sorted((a, b))
    if hi <= lo * (1 + 1e-9):
        return
    kw = dict(hbar=1.0, kB=1.0)
    assert scales.mean_free_path(hi, 1.0) < scales.mean_free_path(lo, 1.0)
    assert scales.mean_free_path(1.0, hi) < scales.mean_free_path(1.0, lo)
    assert scales.characteristic_temperature(hi, 1.0, **kw) < scales.characteristic_temperature(lo, 1.0, **kw)
    assert scales.characteristic_temperature(1.0, hi, **kw) < scales.characteristic_temperature(1.0, lo, **kw)
    assert scales.collision_time_residual(hi, 1.0, hbar=1) > scales.collision_time_residual(lo, 1.0, hbar=1)
    assert scales.collision_time_residual(1.0, hi, hbar=1) > scales.collision_time_residual(1.0, lo, hbar=1)
    assert scales.thermal_de_broglie(hi, 1.0, **kw) < scales.thermal_de_broglie(lo, 1.0, **kw)
    assert scales.thermal_de_broglie(1.0, hi, **kw) < scales.thermal_de_broglie(1.0, lo, **kw)


def test_system_validation():
    with pytest.raises(DomainError):
        ParticleGasSystem(-1, 1, 1, 1)
    with pytest.raises(DomainError):
        ParticleGasSystem(1, 100, 1, 1, -0.5)
    with pytest.warns(MassRatioWarning):
        ParticleGasSystem(1.0, 5.0, 1.0, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ParticleGasSystem(1.0, 50.0, 1.0, 1.0)


def test_dimensionless_definitions(hydrogen):
    sc = derive_scales(hydrogen)
    b = sc.b_residual
    state = to_dimensionless(hydrogen, sc, sc.tau_residual, HBAR / b)
    assert state.time == pytest.approx(1, rel=1e-15)
    assert state.dispersion == pytest.approx(1, rel=1e-15)
    # u and y coincide under the residual friction
    assert state.dispersion_mfp == pytest.approx(state.dispersion, rel=1e-14)


def test_dimensionless_needs_friction_above_zero_temperature(hydrogen):
    warm = hydrogen.with_temperature(2.0)
    sc = derive_scales(warm)
    with pytest.raises(DomainError, match="friction"):
        to_dimensionless(warm, sc, 1e-12, 1e-20)


@given(st.floats(0, 100), st.one_of(st.just(0.0), st.floats(1e-18, 1e-9)),
       st.one_of(st.just(0.0), st.floats(1e-30, 1e-16)), st.floats(1e-17, 1e-12))
def test_dimensionless_round_trip(T, t, sigma_x2, b):
    system = ParticleGasSystem(H_MASS, 50 * H_MASS, 1e-19, 3.3e28, T)
    sc = derive_scales(system)
    state = to_dimensionless(system, sc, t, sigma_x2, b)
    T2, t2, s2 = from_dimensionless(system, sc, state, b)
    assert T2 == pytest.approx(T, rel=1e-12, abs=0)
    assert t2 == pytest.approx(t, rel=1e-12, abs=0)
    assert s2 == pytest.approx(sigma_x2, rel=1e-12, abs=0)


def test_dimensionless_state_rejects_negative():
    with pytest.raises(DomainError):
        DimensionlessState(-1.0, 0.0, 0.0, 0.0)


def test_u_equals_y_under_residual_friction():
    system = ParticleGasSystem(2.0, 100.0, 0.5, 3.0, 0.0)
    sc = derive_scales(system, hbar=1.0, kB=1.0)
    for sigma_x2 in (0.1, 1.0, 7.5):
        state = to_dimensionless(system, sc, 1.0, sigma_x2, hbar=1.0)
        assert state.dispersion_mfp == pytest.approx(state.dispersion, rel=1e-14)
