import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from arinfinity import hodge
from arinfinity.factors import LogComplex, gamma_C, log_gamma
from arinfinity.regdet import (
    BranchError,
    ZetaPole,
    check_alternating,
    check_deninger,
    hurwitz_zeta,
    hurwitz_zeta_at_0,
    hurwitz_zeta_dz_at_0,
    parse_grid,
    regdet,
    zeta_two_var,
)
from arinfinity.spectral import Entry, Progression, SpectralMeasure

TWO_PI = 2 * math.pi


def test_classical_values():
    assert hurwitz_zeta(2, 1).real == pytest.approx(math.pi ** 2 / 6, rel=1e-13)
    assert hurwitz_zeta(0, 2.5) == pytest.approx(-2.0, abs=1e-13)
    assert hurwitz_zeta_at_0(2.5) == -2.0
    assert hurwitz_zeta_dz_at_0(1).real == pytest.approx(-0.5 * math.log(TWO_PI), rel=1e-13)


@pytest.fixture(autouse=True, scope="module")
def precise_mpmath():
    with mpmath.workdps(50):
        yield


z_narrow = st.builds(complex, st.floats(-5, 30), st.floats(-5, 5))
z_wide = st.builds(complex, st.floats(0, 30), st.floats(-20, 20))
a_values = st.builds(complex, st.floats(0.05, 30), st.floats(-40, 40))


@settings(max_examples=80, deadline=None)
@given(st.one_of(z_narrow, z_wide), a_values)
def test_hurwitz_against_mpmath(z, a):
    assume(abs(z - 1) > 1e-3)
    expected = complex(mpmath.zeta(z, a))
    # relative error is meaningless at the zeros of zeta_H
    assume(abs(expected) > 1e-6)
    assert abs(hurwitz_zeta(z, a) / expected - 1) <= 1e-10


def test_hurwitz_far_left_does_not_stall():
    # outside the 1e-10 domain; with a fixed number of correction terms the
    # remainder stops decaying near Re z = -29 and the error was of order 1
    for z, a in ((-25.5, 2.25), (-15.1 - 1.2j, 2.2 - 0.3j), (-29.4 - 4.8j, 2.8 - 2.6j)):
        expected = complex(mpmath.zeta(z, a))
        assert abs(hurwitz_zeta(z, a) / expected - 1) <= 1e-6


def test_hurwitz_large_imaginary_a():
    expected = complex(mpmath.zeta(20, 0.5 + 40j))
    assert abs(hurwitz_zeta(20, 0.5 + 40j) / expected - 1) <= 1e-12


@given(st.complex_numbers(max_magnitude=45, allow_nan=False, allow_infinity=False))
def test_lerch_identity(a):
    if a.real <= 0 and abs(a.imag) < 1e-3 or abs(a) < 1e-3:
        return
    lhs = hurwitz_zeta_dz_at_0(a)
    rhs = log_gamma(a) - 0.5 * math.log(TWO_PI)
    # compare modulo 2 pi i: only exp of the logarithm is fixed
    assert abs(cmath.exp(lhs - rhs) - 1) <= 1e-10


def test_errors():
    with pytest.raises(ZetaPole):
        hurwitz_zeta(1, 2)
    with pytest.raises(BranchError):
        hurwitz_zeta(2, -3)
    m = SpectralMeasure({0: Entry(1, {})})
    with pytest.raises(BranchError):
        zeta_two_var(m, "identity", 0, 0.5)


def test_zeta_two_var_examples():
    single = SpectralMeasure({0: Entry(1, {})})
    assert zeta_two_var(single, "identity", 2, 1) == pytest.approx(0.5)
    tail = SpectralMeasure(tails=[Progression(0, -1, 1, {"identity": 1})])
    for z in (2.5, 0.3 + 1j, -1.5):
        assert zeta_two_var(tail, "identity", 3.2, z) == pytest.approx(complex(mpmath.zeta(z, 3.2)), rel=1e-10)
    assert zeta_two_var(tail, "nothing", 3.2, 2) == 0


def test_step_plus_one_tail_branch():
    # eigenvalues 5, 6, 7, ... at s = 2: (s - lambda)^(-z) = (-(3 + l))^(-z), principal branch
    tail = SpectralMeasure(tails=[Progression(5, 1, 1, {"identity": 1})])
    z = 2.5
    # the first terms carry the branch; the remainder is summed on the same branch
    head = mpmath.fsum(mpmath.power(-(3 + l), -z) for l in range(200))
    rest = mpmath.power(-1, -z) * mpmath.zeta(z, 203)
    assert zeta_two_var(tail, "identity", 2, z) == pytest.approx(complex(head + rest), rel=1e-12)
    # e^{-i pi z} = -i at z = 2.5: the whole sum is purely imaginary
    assert abs(zeta_two_var(tail, "identity", 2, z).real) < 1e-15


def test_regdet_examples():
    tail = SpectralMeasure(tails=[Progression(0, -1, 1, {"identity": 1})])
    inv = LogComplex.one() / regdet(tail, "identity", 2, TWO_PI)
    assert inv.to_complex().real == pytest.approx(2.533029591e-2, rel=1e-9)
    single = SpectralMeasure({Fraction(1, 2): Entry(1, {})})
    assert regdet(single, "identity", 3.0).to_complex() == pytest.approx(2.5, rel=1e-14)
    assert regdet(SpectralMeasure(), "identity", 3.0).log == 0


def test_regdet_is_multiplicative_under_union():
    a = SpectralMeasure({1: Entry(2, {})}, [Progression(0, -1, 3, {})])
    b = SpectralMeasure({-2: Entry(1, {})}, [Progression(1, -1, 1, {})])
    s = 2.4
    lhs = regdet(a.union(b), "identity", s, TWO_PI)
    rhs = regdet(a, "identity", s, TWO_PI) * regdet(b, "identity", s, TWO_PI)
    assert lhs.rel_diff(rhs) <= 1e-13


@pytest.mark.parametrize("name", ["point", "p1", "elliptic_curve", "abelian_surface", "k3"])
def test_deninger_every_degree(name):
    d = hodge.shipped(name)
    for m in range(2 * d.n + 1):
        if d.betti(m):
            rep = check_deninger(d, m, [1.5, 2.25, 3.0, 4.5])
            assert rep["ok"], rep["max_rel_error"]
            assert not rep["skipped"]


def test_deninger_skips_poles():
    rep = check_deninger(hodge.shipped("point"), 0, [0.0, 2.0])
    assert len(rep["skipped"]) == 1 and len(rep["points"]) == 1


def test_alternating_elliptic_and_point():
    for name in ("point", "elliptic_curve", "p1"):
        rep = check_alternating(hodge.shipped(name), [2.0, 3.0, 3.5])
        assert rep["ok"], rep["max_rel_error"]
        assert rep["max_rel_error"] <= 1e-10


def test_complex_s_grid_point():
    d = hodge.shipped("elliptic_curve")
    rep = check_deninger(d, 1, [2 + 0.5j])
    assert rep["ok"]


def test_parse_grid():
    assert parse_grid("1.5:4:0.5") == [1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    assert parse_grid("2,3.5") == [2.0, 3.5]
    with pytest.raises(ValueError):
        parse_grid("4:1:0.5")
