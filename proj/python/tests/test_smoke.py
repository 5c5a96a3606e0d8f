import cmath
import math

import pytest

import ewlat

HEX = cmath.exp(1j * math.pi / 3)


def test_params_from_masses():
    p = ewlat.from_masses(80.379, 91.1876, 125.09)
    assert p.n == 1
    assert math.isclose(p.e, p.g * math.sin(p.theta), rel_tol=1e-14)
    assert math.isclose(p.m_w, 1.0)


def test_reduce_tau():
    r, m = ewlat.reduce_tau(1 + 1j)
    assert abs(r - 1j) < 1e-14
    assert m[0] * m[3] - m[1] * m[2] == 1


def test_shape_functions_prefer_hexagonal():
    p = ewlat.from_masses(80.379, 91.1876, 125.09)
    hexa = ewlat.shape_functions(p, HEX, 32)
    square = ewlat.shape_functions(p, 1j, 32)
    assert hexa["eta"] > square["eta"]
    assert abs(hexa["beta"] - 1.159595267) < 1e-8


def test_stability_verdict():
    p = ewlat.from_masses(80.379, 91.1876, 125.09)
    verdict, ev = ewlat.stability(p, 1.25 * p.b_star)
    assert verdict == "unstable"
    assert math.isclose(ev, -0.2, rel_tol=1e-12)
    assert ewlat.stability(p, 0.5 * p.b_star)[0] == "stable"


def test_lowest_landau_level():
    levels = ewlat.landau_levels(1, 1j, 24, 2)
    assert abs(levels[0] - 1.0) < 1e-3


def test_validation_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        ewlat.from_masses(91.0, 80.0, 125.0)
    with pytest.raises(ewlat.ValidationError):
        ewlat.verify('{"bogus": 1}')
