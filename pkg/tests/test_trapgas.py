import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from efimovloss.errors import DomainError, RangeError
from efimovloss.physconst import DEFAULT
from efimovloss.trapgas import (
    GasState,
    TrapConfig,
    density_squared_average,
    fermi_temperature,
    loss_coefficient,
    mean_frequency,
    peak_density,
    trap_frequencies,
)

# trap B at 1500 G: 33 sqrt(1 + 1.4e-3 * 658), 21 sqrt(1 + 3.6e-3 * 658), 94
TRAP_B_1500 = (45.74042850695651, 38.54401120796848, 94.0)
NUBAR_B_1500 = 54.92815316970543


def test_trap_a():
    nu = trap_frequencies(TrapConfig.trap_a(), 900.0)
    assert nu == pytest.approx((15.0, 7.26, 12.0), rel=1e-14)


def test_trap_b():
    assert trap_frequencies(TrapConfig.trap_b(), 842.0) == (33.0, 21.0, 94.0)
    assert trap_frequencies(TrapConfig.trap_b(), 1500.0) == pytest.approx(TRAP_B_1500, rel=1e-14)
    with pytest.raises(RangeError):
        trap_frequencies(TrapConfig.trap_b(), 800.0)


def test_custom_trap_ignores_field():
    t = TrapConfig.custom(10, 20, 30)
    assert trap_frequencies(t, math.nan) == (10.0, 20.0, 30.0)
    with pytest.raises(DomainError):
        TrapConfig.custom(10, -1, 30)


def test_mean_frequency():
    assert mean_frequency((8, 8, 8)) == pytest.approx(8)
    assert mean_frequency((1, 8, 64)) == pytest.approx(8)
    assert mean_frequency((1, 8, 1)) == pytest.approx(2)
    assert mean_frequency(TRAP_B_1500) == pytest.approx(NUBAR_B_1500, rel=1e-12)
    with pytest.raises(DomainError):
        mean_frequency((1, 0, 1))


freqs = st.floats(min_value=0.1, max_value=1e4)


@given(freqs, freqs, freqs, st.floats(min_value=0.01, max_value=100))
def test_mean_frequency_symmetric_homogeneous(a, b, c, k):
    m = mean_frequency((a, b, c))
    assert mean_frequency((c, a, b)) == pytest.approx(m, rel=1e-13)
    assert mean_frequency((k * a, k * b, k * c)) == pytest.approx(k * m, rel=1e-13)


def test_density_identities():
    s = GasState(1e5, 100e-9)
    nb = 50.0
    n0 = peak_density(s, nb)
    assert density_squared_average(s, nb) * math.sqrt(27) == pytest.approx(n0**2, rel=1e-14)
    assert peak_density(GasState(2e5, 100e-9), nb) == pytest.approx(2 * n0, rel=1e-14)
    assert density_squared_average(GasState(2e5, 100e-9), nb) == pytest.approx(
        4 * density_squared_average(s, nb), rel=1e-14)
    assert density_squared_average(GasState(0.0, 100e-9), nb) == 0.0
    # <n^2> L3 N is the three-body loss term of the rate equation
    L3 = 1e-34
    assert L3 * density_squared_average(s, nb) == pytest.approx(loss_coefficient(L3, s.T, nb) * s.N**2, rel=1e-13)


def test_peak_density_temperature_slope():
    T = np.geomspace(1e-9, 1e-6, 20)
    n = np.array([peak_density(GasState(1e5, t), 50.0) for t in T])
    assert np.allclose(np.diff(np.log(n)) / np.diff(np.log(T)), -1.5, atol=1e-9)


def test_trap_a_density_band():
    # 30 nK gas in trap A at 1000 G with a few 10^4 atoms gives n0 of order 5e9 cm^-3
    nb = mean_frequency(trap_frequencies(TrapConfig.trap_a(), 1000.0))
    n0_cm3 = peak_density(GasState(3e4, 30e-9), nb) * 1e-6
    assert 1e9 < n0_cm3 < 2.5e10


def test_gas_state_validation():
    with pytest.raises(DomainError):
        GasState(1e5, 0.0)
    with pytest.raises(DomainError):
        GasState(-1, 1e-7)


def test_fermi_temperature():
    TF = fermi_temperature(6e4, NUBAR_B_1500)
    assert TF * 1e9 == pytest.approx(187.5, abs=0.1)
    assert 0.25 <= 50e-9 / TF <= 0.31
    assert fermi_temperature(8 * 6e4, NUBAR_B_1500) == pytest.approx(2 * TF, rel=1e-13)
    with pytest.raises(DomainError):
        fermi_temperature(0.5, 50.0)


@given(st.floats(min_value=1, max_value=1e8), freqs, st.floats(min_value=0.01, max_value=100))
def test_fermi_temperature_homogeneous(N, nb, k):
    assert fermi_temperature(N, k * nb) == pytest.approx(k * fermi_temperature(N, nb), rel=1e-13)


def test_mean_rel_sigma():
    t = TrapConfig.trap_b()
    assert t.mean_rel_sigma() == pytest.approx(math.sqrt(0.03**2 * 2 + (2 / 94) ** 2) / 3)
