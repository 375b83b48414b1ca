import cmath
import json
import math

import pytest

import qes


def test_spectrum_small_m():
    assert qes.spectrum(1, 0) == pytest.approx([-2 * math.sqrt(2), 2 * math.sqrt(2)], abs=1e-12)
    assert qes.spectrum(2, 0) == pytest.approx([-8, 0, 8], abs=1e-12)
    # Eigenvalues of m = 2 solve l^3 - 15b l^2 + (59b^2 - 64) l - 45b^3 + 192b.
    b = 0.75 + 1j
    for lam in qes.spectrum(2, b):
        p = lam**3 - 15 * b * lam**2 + (59 * b * b - 64) * lam - 45 * b**3 + 192 * b
        assert abs(p) < 1e-10 * (abs(lam) + 1) ** 3


def test_scaled_spectrum():
    m, b = 4, 0.5 + 0.3j
    plain = qes.spectrum(m, b * math.sqrt(m))
    scaled = qes.spectrum(m, b, scaled=True)
    assert scaled == pytest.approx([z / m**1.5 for z in plain], abs=1e-12)
    assert json.loads(qes.spectrum_json(2, 0))["eigenvalues"] == [[-8.0, 0.0], [0.0, 0.0], [8.0, 0.0]]


def test_exact_polynomials():
    # lambda^2 - 6b lambda + 5b^2 - 8
    assert qes.charpoly(1) == {(2, 0): 1, (1, 1): -6, (0, 2): 5, (0, 0): -8}
    assert qes.discriminant(1) == [32, 0, 16]
    d = qes.discriminant(6)
    assert len(d) - 1 == 42
    assert all(c == 0 for c in d[1::2])
    assert all(isinstance(c, int) for c in d)
    assert d[-1] > 0
    # Coefficients far beyond the decimal conversion limit survive exactly.
    big = qes.discriminant(20)
    assert len(big) == 421 and max(abs(c) for c in big).bit_length() > 1000


def test_crossings():
    pts = qes.crossings(1)
    assert [p["b"] for p in pts] == pytest.approx([1j * math.sqrt(2), -1j * math.sqrt(2)], abs=1e-12)
    pts = qes.crossings(4)
    upper = [p for p in pts if p["b"].imag > 0]
    assert len(pts) == 20 and len(upper) == 10
    assert sorted({p["row"] for p in upper}) == [1, 2, 3, 4]
    assert json.loads(qes.crossings_json(3))["count"] == 12


def test_monodromy_and_tracking():
    assert qes.monodromy(5, 1, 1) == (5, 6)
    assert qes.conjectured_transposition(5, 2, 1) == (4, 6)
    assert qes.track(3, [0.5, 0.5]) == [1, 2, 3, 4]
    assert qes.track(2, [0.1, 0.2, 0.3]) == [1, 2, 3]


def test_asymptotics():
    f = qes.foci(1.0)
    assert f[0] == 0
    left, right = qes.support_interval_real(1.0)
    assert sorted([left, right]) == pytest.approx(sorted([f[1].real, f[2].real]))
    assert qes.density_real(1.0, right + 1) == 0.0
    assert qes.density_real(1.0, 0.5 * right) > 0.0
    z = 50 + 10j
    assert qes.cauchy_transform(0.75 + 1j, z) == pytest.approx(1 / z, rel=0.2)
    assert qes.quartic_beta(6, math.sqrt(27)) == pytest.approx(0)
    crit = qes.critical_lambdas(0.75 + 1j)
    assert len(crit) == 2 and all(isinstance(c, complex) for c in crit)


def test_errors():
    with pytest.raises(ValueError):
        qes.spectrum(0, 0)
    with pytest.raises(ValueError):
        qes.monodromy(3, 4, 1)
    with pytest.raises(qes.NumericalFailure):
        qes.track(1, [0, 2j])
    assert issubclass(qes.NumericalFailure, RuntimeError)
