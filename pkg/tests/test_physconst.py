import math

import pytest
from hypothesis import given, strategies as st

from efimovloss.errors import DomainError, ParseError, UnitError
from efimovloss.physconst import DEFAULT, UNITS, PhysicalConstants, Quantity, convert, load_constants


def test_h_is_two_pi_hbar():
    assert DEFAULT.h == 2 * math.pi * DEFAULT.hbar


def test_li6_mass():
    assert DEFAULT.m == pytest.approx(9.98834e-27, rel=1e-6)


def test_constants_must_be_positive():
    with pytest.raises(DomainError):
        PhysicalConstants(m=-1.0)


def test_metre_in_bohr():
    q = convert(Quantity(1.0, "m"), "a0")
    assert q.value == pytest.approx(1 / 5.29177e-11, rel=1e-5)
    assert q.value == pytest.approx(1.8897e10, rel=1e-4)


def test_m6_per_s_to_cm6_per_s():
    assert convert(Quantity(1.0, "m^6/s"), "cm^6/s").value == pytest.approx(1e12, rel=1e-15)


def test_vdw_length_in_metres():
    # 62.5 * 5.29177210544e-11 m by hand
    assert convert(Quantity(62.5, "a0"), "m").value == pytest.approx(3.3073575659e-9, rel=1e-10)


def test_energy_units():
    q = convert(Quantity(55.0, "h*kHz"), "h*Hz")
    assert q.value == pytest.approx(55e3)


def test_dimension_mismatch():
    with pytest.raises(UnitError):
        convert(Quantity(1.0, "m"), "s")
    with pytest.raises(UnitError):
        Quantity(1.0, "m") + Quantity(1.0, "K")
    with pytest.raises(UnitError):
        Quantity(1.0, "furlong")


def test_addition_converts():
    q = Quantity(1.0, "m") + Quantity(50.0, "cm")
    assert q.unit == "m" and q.value == pytest.approx(1.5)
    assert Quantity(1.0, "nK") < Quantity(1.0, "uK")


_units = sorted(UNITS)


@given(
    value=st.floats(min_value=-1e30, max_value=1e30, allow_nan=False).filter(lambda v: abs(v) > 1e-30),
    pair=st.sampled_from([(a, b) for a in _units for b in _units if UNITS[a][0] == UNITS[b][0]]),
)
def test_roundtrip(value, pair):
    a, b = pair
    back = convert(convert(Quantity(value, a), b), a)
    assert back.value == pytest.approx(value, rel=1e-14)


def test_ratios_independent_of_input_units():
    # a dimensionless ratio is the same whether formed in SI or in a0
    r_si = Quantity(5000.0, "a0").si() / Quantity(62.5, "a0").si()
    r_a0 = convert(Quantity(5000.0 * DEFAULT.a0, "m"), "a0").value / 62.5
    assert r_si == pytest.approx(r_a0, rel=1e-14)


def test_load_constants(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("# sensitivity run\nm = 1.0e-26\n\nkB = 1.380649e-23  # exact\n")
    c = load_constants(path)
    assert c.m == 1.0e-26 and c.hbar == DEFAULT.hbar
    path.write_text("h = 6.6e-34\n")
    with pytest.raises(ParseError):
        load_constants(path)
