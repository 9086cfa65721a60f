from fractions import Fraction

import pytest

from arinfinity import hodge
from arinfinity.lattice import Window, in_region_pqrk
from arinfinity.operators import (
    PartialOperatorError,
    SparseOperator,
    check_relations,
    duality_S,
    duality_Stilde,
    frobenius_Phi,
    frobenius_flow_relation,
    lefschetz_L,
    monodromy_N,
    rep_sigma,
    sl2_for,
    stilde_string_constants,
    weyl_coefficients,
)
from arinfinity.scalars import GaussianRational
from arinfinity.tcomplex import GradedIndex as B, build_truncation

SMALL = Window(-3, 3, 6)


def space_for(name, window=SMALL):
    return build_truncation(hodge.shipped(name), window)


def image(op, space, b):
    col = op.column(space.position[b])
    return {space.basis[r]: v for r, v in col.items()}


def test_N_examples_on_point():
    space = space_for("point")
    N = monodromy_N(space)
    # (r, k) = (0, 0) -> (1, 1) leaves the region: kappa(0,0,1) = 2
    assert image(N, space, B(0, 0, 0, 0, 0)) == {}
    assert image(N, space, B(0, 0, -1, 0, 0)) == {B(0, 0, 0, 1, 0): 1}


def test_N_shifts_grading_and_marks_window_edge():
    space = space_for("elliptic_curve")
    N = monodromy_N(space)
    for c, col in N.cols.items():
        b = space.basis[c]
        for r in col:
            t = space.basis[r]
            assert (t.p, t.q, t.r, t.k, t.slot) == (b.p, b.q, b.r + 1, b.k + 1, b.slot)
    # escaping exactly when the image is a region point outside the window
    for i, b in enumerate(space.basis):
        target_in_region = in_region_pqrk(b.p, b.q, b.r + 1, b.k + 1)
        outside = not SMALL.contains(b.r + 1, b.k + 1)
        assert (i in N.escaping) == (target_in_region and outside)


def test_Phi_eigenvalue():
    space = space_for("elliptic_curve")
    Phi = frobenius_Phi(space)
    assert image(Phi, space, B(1, 0, 2, 6, 0)) == {B(1, 0, 2, 6, 0): -2}


def test_lefschetz_string_lengths():
    k3 = space_for("k3")
    sl2 = sl2_for(k3.datum)
    L = lefschetz_L(k3, sl2)
    b = B(0, 0, 1, 4, 0)
    assert image(L, k3, b) == {B(1, 1, 0, 4, 0): 1}
    assert image(L @ L, k3, b) == {B(2, 2, -1, 4, 0): 1}
    assert image(L.power(3), k3, b) == {}
    e = space_for("elliptic_curve")
    Le = lefschetz_L(e, sl2_for(e.datum))
    assert image(Le, e, B(1, 0, 0, 1, 0)) == {}


@pytest.mark.parametrize("d", range(6))
def test_weyl_element_is_monomial_with_square_sign(d):
    w = weyl_coefficients(d)
    assert sorted(w) == list(range(d + 1))
    # w^2 = (-1)^d on the (d+1)-dimensional irreducible module
    for j in range(d + 1):
        assert w[j] * w[d - j] == (-1) ** d


@pytest.mark.parametrize("name", hodge.SHIPPED)
def test_full_relation_suite_exact(name):
    rep = check_relations(space_for(name))
    failed = [r.name for r in rep["results"] if not r.passed]
    assert rep["ok"], failed
    assert all(r.checked > 0 for r in rep["results"])


def test_S_squares_to_one_and_maps_region_to_region():
    space = space_for("abelian_surface", Window(-4, 4, 8))
    S = duality_S(space)
    for c, col in S.cols.items():
        ((r, v),) = col.items()
        assert v == 1
        assert S.column(r) == {c: 1}
    with pytest.raises(PartialOperatorError):
        duality_S(space, strict=True)


def test_stilde_constants_are_nonzero_units():
    space = space_for("k3", Window(-4, 4, 8))
    consts = stilde_string_constants(space, sl2_for(space.datum))
    assert consts
    values = {complex(c) for c in consts.values()}
    assert all(abs(v) > 0 for v in values)
    # the constant depends only on the string, not on its (r, k) position
    by_anchor = {}
    for (anchor, idx, _, _), c in consts.items():
        by_anchor.setdefault((anchor, idx), set()).add(c)
    assert all(len(v) == 1 for v in by_anchor.values())


def test_stilde_reflects_bidegree():
    space = space_for("k3", Window(-4, 4, 8))
    St = duality_Stilde(space, sl2_for(space.datum))
    n = space.datum.n
    for c, col in St.cols.items():
        b = space.basis[c]
        for r in col:
            t = space.basis[r]
            assert (t.p, t.q, t.r, t.k) == (n - b.q, n - b.p, b.r - (n - b.m), b.k)


def test_rep_sigma_rejects_float_and_zero():
    space = space_for("point")
    with pytest.raises(TypeError):
        rep_sigma(space, "R", "chi", 1.5)
    with pytest.raises(ValueError):
        rep_sigma(space, "R", "chi", 0)
    with pytest.raises(ValueError):
        rep_sigma(space, "X", "w")


def test_exact_scalars_stay_exact():
    space = space_for("elliptic_curve")
    u = rep_sigma(space, "R", "u", Fraction(5, 3))
    for col in u.cols.values():
        for v in col.values():
            assert isinstance(v, (int, Fraction, GaussianRational))


def test_frobenius_flow_tolerance():
    res = frobenius_flow_relation(space_for("k3"), t=1.0)
    assert res.passed and res.residual <= 1e-12 and res.checked > 0


def test_compare_only_on_trusted_columns():
    space = space_for("point")
    N = monodromy_N(space)
    damaged = SparseOperator(space, N.cols, N.escaping, N.adj_escaping)
    (c,) = sorted(N.escaping)[:1]
    damaged.cols[c] = {0: 7}
    assert damaged.equals(N)
    c_inside = min(N.interior & set(N.cols))
    damaged.cols[c_inside] = {0: 7}
    worst, checked, first_bad = damaged.compare(N)
    assert worst == 7 and first_bad[0] == space.basis[c_inside]


def test_mismatched_spaces_refused():
    a, b = space_for("point"), space_for("point")
    with pytest.raises(ValueError):
        monodromy_N(a) @ monodromy_N(b)
