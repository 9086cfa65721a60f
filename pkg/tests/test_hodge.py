import json

import pytest

from arinfinity import hodge
from arinfinity.hodge import HodgeDatum, InvalidHodgeDatum, filtration_dim, primitive_dims, validate


@pytest.fixture
def elliptic():
    return hodge.shipped("elliptic_curve")


@pytest.mark.parametrize("name", hodge.SHIPPED)
def test_shipped_data_are_valid(name):
    assert validate(hodge.shipped(name)) == []


def test_k3_rules_by_hand():
    k3 = hodge.shipped("k3")
    assert k3.n == 2
    assert k3.hpq(2, 0) == k3.hpq(0, 2) == 1
    assert k3.hpq(1, 1) == 20
    assert k3.hpq(1, 0) == 0
    assert [k3.betti(m) for m in range(5)] == [1, 0, 22, 0, 1]


def test_broken_symmetry_and_serre_reported():
    bad = HodgeDatum(1, ((1, 2), (0, 1)))
    violations = validate(bad)
    assert "Hodge symmetry at (1,0)" in violations
    assert "Serre duality at (0,1)" in violations
    with pytest.raises(InvalidHodgeDatum) as info:
        hodge.require_valid(bad)
    assert info.value.violations == violations


def test_lefschetz_monotonicity_violation():
    # h^{1,1} < h^{0,0} breaks injectivity of L on H^0
    bad = HodgeDatum(2, ((1, 0, 0), (0, 0, 0), (0, 0, 1)))
    assert any("monotonicity" in v for v in validate(bad))


def test_real_splitting_checked():
    ok = HodgeDatum(0, ((1,),), field="R", h_plus_minus=((1, 0),))
    assert validate(ok) == []
    bad = HodgeDatum(0, ((1,),), field="R", h_plus_minus=((1, 1),))
    assert any("real splitting" in v for v in validate(bad))


def test_filtration_examples(elliptic):
    assert filtration_dim(elliptic, "F", 1, 1) == 1
    assert filtration_dim(elliptic, "Fbar", 0, 1) == 2
    assert filtration_dim(elliptic, "gamma", 1, 1) == 0
    with pytest.raises(ValueError):
        filtration_dim(elliptic, "G", 0, 1)


def test_primitive_dims():
    assert primitive_dims(hodge.shipped("elliptic_curve")) == {(0, 0): 1, (1, 0): 1, (0, 1): 1}
    p1 = primitive_dims(hodge.shipped("p1"))
    assert p1[(0, 0)] == 1 and p1[(1, 0)] == p1[(0, 1)] == 0
    assert primitive_dims(hodge.shipped("k3"))[(1, 1)] == 19


@pytest.mark.parametrize("name", hodge.SHIPPED)
def test_lefschetz_slots_cover_every_class(name):
    d = hodge.shipped(name)
    slots = hodge.lefschetz_slots(d)
    for p, q in d.pairs():
        assert len(slots[(p, q)]) == d.h[p][q]
        for s in slots[(p, q)]:
            assert (s.anchor[0] + s.rung, s.anchor[1] + s.rung) == (p, q)
            assert s.length == d.n - sum(s.anchor)


def test_round_trip_through_file(tmp_path):
    d = HodgeDatum(0, ((1,),), field="R", h_plus_minus=((0, 1),), name="odd point")
    path = tmp_path / "d.json"
    hodge.dump(d, path)
    assert hodge.load(path) == d
    assert json.loads(path.read_text())["h_minus"] == [1]


def test_resolve_accepts_name_or_path(tmp_path):
    assert hodge.resolve("k3") == hodge.shipped("k3")
    path = tmp_path / "e.json"
    hodge.dump(hodge.shipped("elliptic_curve"), path)
    assert hodge.resolve(str(path)) == hodge.shipped("elliptic_curve")
    with pytest.raises(KeyError):
        hodge.shipped("quintic")
