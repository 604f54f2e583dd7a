"""Unit-system conversions: round trips, frozen factors, CODATA sanity."""

import math

import numpy as np
import pytest

from blochdyn import ConfigError, UnitSystem
from blochdyn.units import E_CHARGE_SI, HBAR_SI, M_E_SI, DIMENSION_TAGS


@pytest.fixture
def angstrom():
    return UnitSystem(1e-10)


def test_energy_unit_frozen(angstrom):
    # ħ²/(m a²) at a = 1 Å, expressed in eV
    assert angstrom.energy_eV == pytest.approx(7.619964222971922, rel=1e-12)


def test_field_conversion_frozen(angstrom):
    # 10 V/m lab field is a vanishing fraction of the atomic field scale
    assert angstrom.to_internal(10.0, "electric_field") == pytest.approx(
        1.3123421196457824e-10, rel=1e-12)
    # one atomic field unit is ~7.6e10 V/m
    assert angstrom.factor("electric_field") == pytest.approx(7.6199e10, rel=1e-4)


def test_wavevector_factor(angstrom):
    # a reciprocal lattice vector 2π/a in SI
    assert angstrom.to_si(2.0 * math.pi, "wavevector") == pytest.approx(
        6.283185307179586e10, rel=1e-12)


def test_round_trips_all_tags(angstrom):
    rng = np.random.default_rng(7)
    for tag in DIMENSION_TAGS:
        for _ in range(20):
            val = float(rng.uniform(1e-3, 1e3))
            assert angstrom.to_si(angstrom.to_internal(val, tag), tag) == \
                pytest.approx(val, rel=1e-12)
            assert angstrom.to_internal(angstrom.to_si(val, tag), tag) == \
                pytest.approx(val, rel=1e-12)


def test_composite_factor_identities(angstrom):
    f = angstrom.factor
    assert f("velocity") == pytest.approx(f("length") / f("time"), rel=1e-12)
    assert f("energy") == pytest.approx(
        HBAR_SI ** 2 / (M_E_SI * f("length") ** 2), rel=1e-12)
    # field x charge x length = energy
    assert f("electric_field") * E_CHARGE_SI * f("length") == pytest.approx(
        f("energy"), rel=1e-12)
    # magnetic field unit: ħ/(e a²)
    assert f("magnetic_field") == pytest.approx(
        HBAR_SI / (E_CHARGE_SI * f("length") ** 2), rel=1e-12)
    assert f("wavevector") == pytest.approx(1.0 / f("length"), rel=1e-12)


def test_drive_norm_scale_at_lab_field():
    # ħ e E / sqrt(m) for E = 10 V/m sets the SI scale of the drive norm
    val = HBAR_SI * E_CHARGE_SI * 10.0 / math.sqrt(M_E_SI)
    assert val == pytest.approx(1.78e-37, rel=0.02)


def test_scaling_with_lattice_constant():
    a1, a2 = UnitSystem(1e-10), UnitSystem(2e-10)
    assert a2.energy_eV == pytest.approx(a1.energy_eV / 4.0, rel=1e-12)
    assert a2.factor("time") == pytest.approx(4.0 * a1.factor("time"), rel=1e-12)


def test_unknown_tag_rejected(angstrom):
    with pytest.raises(ConfigError):
        angstrom.factor("momentum")
    with pytest.raises(ConfigError):
        angstrom.to_internal(1.0, "mass")


def test_bad_reference_length_rejected():
    with pytest.raises(ConfigError):
        UnitSystem(0.0)
    with pytest.raises(ConfigError):
        UnitSystem(-1e-10)
    with pytest.raises(ConfigError):
        UnitSystem(float("nan"))
