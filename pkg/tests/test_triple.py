import math

import mpmath
import pytest

from arinfinity import hodge
from arinfinity import triple as tr
from arinfinity.hodge import HodgeDatum
from arinfinity.lattice import Window

DEFAULT = Window(-6, 6, 12)


def brute_multiplicity(datum, u, r):
    """m_r straight from the definitions of the two parts, no helper from the package."""
    total = 0
    for p, q in datum.pairs():
        m = p + q
        kappa = max(0, 2 * r + m, r + max(p, q))
        ker = sum(1 for k in range(kappa, kappa + 2 * u + 2 * abs(r) + 2 * m + 10) if 0 <= k - 2 * r - m <= u)
        coker = sum(1 for k in range(0, u + 1) if k >= kappa)
        total += datum.h[p][q] * (ker + coker)
    return total


def test_elliptic_zero_eigenvalue():
    e = hodge.shipped("elliptic_curve")
    tu = tr.build_Tu(e, 0, DEFAULT)
    ker0 = sorted((b.p, b.q, b.k) for b in tu.ker_part.basis if b.r == 0)
    coker0 = sorted((b.p, b.q, b.k) for b in tu.coker_part.basis if b.r == 0)
    # (1,1) sits at k = 2 = kappa(1,1,0), so it belongs to the bottom layer too
    assert ker0 == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 2)]
    assert coker0 == [(0, 0, 0)]
    assert tr.dirac_spectrum(tu).multiplicities[0] == 5 == brute_multiplicity(e, 0, 0)


def test_layer_shapes():
    e = hodge.shipped("elliptic_curve")
    tu = tr.build_Tu(e, 0, DEFAULT)
    assert all(b.k == 2 * b.r + b.m for b in tu.ker_part.basis)
    assert all(b.k == 0 for b in tu.coker_part.basis)
    pt = tr.build_Tu(hodge.shipped("point"), 1, Window(-3, 3, 6))
    assert all(b.k in (2 * b.r, 2 * b.r + 1) and b.k >= max(0, 2 * b.r) for b in pt.ker_part.basis)


def test_large_u_saturates():
    w = Window(-2, 2, 4)
    tu = tr.build_Tu(hodge.shipped("elliptic_curve"), 50, w)
    full = set(tu.full.basis)
    assert set(tu.coker_part.basis) == full
    assert set(tu.ker_part.basis) == {b for b in full if b.k >= 2 * b.r + b.m}


@pytest.mark.parametrize("name", hodge.SHIPPED)
@pytest.mark.parametrize("u", range(4))
def test_multiplicities_match_brute_force(name, u):
    d = hodge.shipped(name)
    spec = tr.dirac_spectrum(tr.build_Tu(d, u, DEFAULT))
    for r, m in spec.multiplicities.items():
        assert m == brute_multiplicity(d, u, r) == tr.multiplicity(d, u, r)[0]
    assert all(not tr.build_Tu(d, u, DEFAULT).conclusive(r) for r in spec.inconclusive)


@pytest.mark.parametrize("name", hodge.SHIPPED)
@pytest.mark.parametrize("u", range(4))
def test_multiplicity_true_bound(name, u):
    d = hodge.shipped(name)
    bound = 2 * (u + 1) * d.total_dim()
    assert all(tr.multiplicity(d, u, r)[0] <= bound for r in range(-60, 61))


def test_stated_bound_fails_on_point():
    # the sharper (u+1) * sum h bound does not hold: m_0 = 2 for the point at u = 0
    tu = tr.build_Tu(hodge.shipped("point"), 0, DEFAULT)
    assert tr.dirac_spectrum(tu).multiplicities[0] == 2 > tr.multiplicity_bound(tu) == 1


def test_monotone_in_u_and_union_is_full():
    d = hodge.shipped("abelian_surface")
    w = Window(-3, 3, 6)
    prev = None
    union = set()
    for u in range(0, 8):
        tu = tr.build_Tu(d, u, w)
        union |= set(tu.ker_part.basis) | set(tu.coker_part.basis)
        counts = {r: tr.multiplicity(d, u, r)[0] for r in range(-10, 11)}
        if prev:
            assert all(counts[r] >= prev[r] for r in counts)
        prev = counts
    assert union == set(tr.build_Tu(d, 0, w).full.basis)


def test_empty_datum_has_empty_spectrum():
    # not a valid Hodge datum (h^{0,0} = 0), so the multiplicity count is the only entry point
    zero = HodgeDatum(0, ((0,),))
    assert all(tr.multiplicity(zero, 2, r) == (0, 0) for r in range(-5, 6))


@pytest.mark.parametrize("name", hodge.SHIPPED)
def test_zeta_two_paths(name):
    d = hodge.shipped(name)
    tu = tr.build_Tu(d, 0, DEFAULT)
    with mpmath.workdps(30):
        direct = tr.zeta_dirac_direct(d, 0, 2.0)
    assert tr.zeta_dirac(tu, 2.0) == pytest.approx(direct, rel=1e-9)


def test_point_zeta_by_hand():
    # multiplicities are constant for |r| >= 20 on each side, so 19 terms plus two Hurwitz tails are exact
    d = hodge.shipped("point")
    tu = tr.build_Tu(d, 0, DEFAULT)
    up, down = brute_multiplicity(d, 0, 100), brute_multiplicity(d, 0, -100)
    head = sum(brute_multiplicity(d, 0, r) / r ** 2 + brute_multiplicity(d, 0, -r) / r ** 2 for r in range(1, 20))
    tail = (up + down) * float(mpmath.zeta(2, 20))
    assert tr.zeta_dirac(tu, 2.0) == pytest.approx(head + tail, rel=1e-12)


def test_zero_weight_observable():
    tu = tr.build_Tu(hodge.shipped("elliptic_curve"), 0, DEFAULT)
    assert tr.zeta_dirac(tu, 2.0, observable="unused") == 0


@pytest.mark.parametrize("name", hodge.SHIPPED)
def test_probe_reports_pole_at_one(name):
    tu = tr.build_Tu(hodge.shipped(name), 0, DEFAULT)
    probe = tr.dimension_spectrum_probe(tu)
    assert probe["status"] == "ok"
    (pole,) = probe["poles"]
    assert pole["z"] == 1 and pole["order"] == 1
    assert pole["numeric_residue"] == pytest.approx(pole["residue"], rel=1e-3)


def test_probe_small_window():
    tu = tr.build_Tu(hodge.shipped("k3"), 0, Window(-1, 1, 2))
    assert tr.dimension_spectrum_probe(tu)["status"] == "window too small"
    with pytest.raises(tr.WindowTooSmall):
        tr.zeta_dirac(tu, 2.0)


@pytest.mark.parametrize("name", hodge.SHIPPED)
def test_sigma_l_stability(name):
    tu = tr.build_Tu(hodge.shipped(name), 1, Window(-4, 4, 8))
    rep = tr.sigma_l_stability(tu)
    assert rep["ok"]
    assert all(v["checked"] > 0 for k, v in rep.items() if isinstance(v, dict) and k.startswith("L"))


def test_commutator_bounded_uniformly():
    d = hodge.shipped("k3")
    rep = tr.commutator_bound(d, [Window(-2, 2, 4), Window(-3, 3, 6), Window(-4, 4, 8)])
    assert rep["ok"]
    ratios = [row["max_ratio"] for row in rep["rows"]]
    assert max(ratios) <= d.n and len(set(ratios)) == 1


@pytest.mark.parametrize("name", hodge.SHIPPED)
def test_connect_prop_zetaL(name):
    rep = tr.connect_prop_zetaL(hodge.shipped(name), [1.5, 2.0, 3.0])
    assert rep["spectrum_match"], rep["mismatches"]
    assert rep["ok"]


def test_two_variable_zeta_uses_tails():
    tu = tr.build_Tu(hodge.shipped("point"), 0, DEFAULT)
    val = tr.zeta_dirac_two_var(tu, "identity", 0.5, 2.0)
    spec = tr.dirac_spectrum(tu)
    assert len(spec.measure.tails) == 2 and math.isfinite(abs(val))
