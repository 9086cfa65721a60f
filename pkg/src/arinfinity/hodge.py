"""Hodge data: validation, filtration dimensions, primitive parts.

A :class:`HodgeDatum` is the only geometric input of the package.  Rows of
the ``h`` table are indexed by ``p`` and columns by ``q``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


class InvalidHodgeDatum(ValueError):
    """Raised when an operation needs a valid datum and gets a broken one."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid Hodge datum")


@dataclass(frozen=True)
class HodgeDatum:
    n: int
    h: tuple
    field: str = "C"
    h_plus_minus: tuple | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(tuple(int(x) for x in row) for row in self.h))
        if self.h_plus_minus is not None:
            object.__setattr__(
                self, "h_plus_minus", tuple((int(a), int(b)) for a, b in self.h_plus_minus)
            )

    def hpq(self, p: int, q: int) -> int:
        if 0 <= p <= self.n and 0 <= q <= self.n:
            return self.h[p][q]
        return 0

    def pairs(self, m: int | None = None):
        """(p, q) pairs with nonzero h^{p,q}, optionally restricted to p+q = m."""
        out = []
        for p in range(self.n + 1):
            for q in range(self.n + 1):
                if self.h[p][q] and (m is None or p + q == m):
                    out.append((p, q))
        return out

    def betti(self, m: int) -> int:
        return sum(self.hpq(p, m - p) for p in range(m + 1))

    def total_dim(self) -> int:
        return sum(sum(row) for row in self.h)


def validate(datum: HodgeDatum) -> list[str]:
    """Return every violated invariant; an empty list means the datum is valid."""
    out = []
    n = datum.n
    if n < 0:
        return [f"negative dimension n={n}"]
    if len(datum.h) != n + 1 or any(len(row) != n + 1 for row in datum.h):
        return [f"Hodge table must be {n + 1}x{n + 1}"]
    for p in range(n + 1):
        for q in range(n + 1):
            if datum.h[p][q] < 0:
                out.append(f"negative Hodge number at ({p},{q})")
    for p in range(n + 1):
        for q in range(p + 1, n + 1):
            if datum.h[p][q] != datum.h[q][p]:
                out.append(f"Hodge symmetry at ({q},{p})")
    seen = set()
    for p in range(n + 1):
        for q in range(n + 1):
            dual = (n - p, n - q)
            if (p, q) in seen or (p, q) == dual:
                continue
            seen.add(dual)
            if datum.h[p][q] != datum.h[dual[0]][dual[1]]:
                out.append(f"Serre duality at ({p},{q})")
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            if p + q <= n and datum.h[p - 1][q - 1] > datum.h[p][q]:
                out.append(f"hard Lefschetz monotonicity at ({p},{q})")
    if datum.h[0][0] < 1:
        out.append("h^{0,0} must be at least 1")
    if datum.field not in ("C", "R"):
        out.append(f"unknown field marker {datum.field!r}")
    if datum.field == "R" and datum.h_plus_minus is not None:
        if len(datum.h_plus_minus) != n + 1:
            out.append(f"h_plus/h_minus must have {n + 1} entries")
        else:
            for p, (hp, hm) in enumerate(datum.h_plus_minus):
                if hp < 0 or hm < 0:
                    out.append(f"negative h^{{{p},±}}")
                if hp + hm != datum.h[p][p]:
                    out.append(f"real splitting at p={p}: {hp}+{hm} != h^{{{p},{p}}}")
    return out


def require_valid(datum: HodgeDatum) -> HodgeDatum:
    violations = validate(datum)
    if violations:
        raise InvalidHodgeDatum(violations)
    return datum


def filtration_dim(datum: HodgeDatum, kind: str, a: int, m: int) -> int:
    """Dimension of F^a, Fbar^a or gamma^a = F^a ∩ Fbar^a on H^m."""
    if not 0 <= m <= 2 * datum.n:
        raise ValueError(f"degree m={m} outside [0, {2 * datum.n}]")
    if kind == "F":
        keep = lambda p, q: p >= a
    elif kind == "Fbar":
        keep = lambda p, q: q >= a
    elif kind == "gamma":
        keep = lambda p, q: min(p, q) >= a
    else:
        raise ValueError(f"unknown filtration {kind!r}")
    return sum(datum.hpq(p, m - p) for p in range(m + 1) if keep(p, m - p))


def primitive_dims(datum: HodgeDatum) -> dict[tuple[int, int], int]:
    """prim^{p,q} = h^{p,q} - h^{p-1,q-1} for p + q <= n."""
    require_valid(datum)
    n = datum.n
    return {
        (p, q): datum.hpq(p, q) - datum.hpq(p - 1, q - 1)
        for p in range(n + 1)
        for q in range(n + 1)
        if p + q <= n
    }


@dataclass(frozen=True)
class StringSlot:
    """Position of one basis slot inside the Lefschetz decomposition."""

    anchor: tuple[int, int]  # primitive bidegree (p0, q0)
    index: int  # which primitive vector at the anchor
    rung: int  # power of the Lefschetz operator applied to it
    length: int  # d = n - p0 - q0; the string has d + 1 rungs


def lefschetz_slots(datum: HodgeDatum) -> dict[tuple[int, int], list[StringSlot]]:
    """For each bidegree, its h^{p,q} slots labelled by Lefschetz string.

    Slots at (a, b) are listed by increasing rung, so slot 0 always belongs
    to the string with the deepest anchor still passing through (a, b).
    """
    prim = primitive_dims(datum)
    n = datum.n
    out: dict[tuple[int, int], list[StringSlot]] = {}
    for (p0, q0), count in sorted(prim.items()):
        d = n - p0 - q0
        for j in range(d + 1):
            key = (p0 + j, q0 + j)
            for idx in range(count):
                out.setdefault(key, []).append(StringSlot((p0, q0), idx, j, d))
    for key, slots in out.items():
        slots.sort(key=lambda s: (-s.rung, s.anchor, s.index))
        assert len(slots) == datum.hpq(*key), key
    return out


# ---------------------------------------------------------------- file format


def from_dict(obj: dict) -> HodgeDatum:
    n = int(obj["dim"])
    hpm = None
    if "h_plus" in obj or "h_minus" in obj:
        hp = obj.get("h_plus") or [0] * (n + 1)
        hm = obj.get("h_minus") or [0] * (n + 1)
        hpm = tuple(zip(hp, hm))
    return HodgeDatum(
        n=n,
        h=obj["hodge"],
        field=obj.get("field", "C"),
        h_plus_minus=hpm,
        name=obj.get("name", ""),
    )


def to_dict(datum: HodgeDatum) -> dict:
    obj = {
        "name": datum.name,
        "dim": datum.n,
        "field": datum.field,
        "hodge": [list(row) for row in datum.h],
    }
    if datum.h_plus_minus is not None:
        obj["h_plus"] = [a for a, _ in datum.h_plus_minus]
        obj["h_minus"] = [b for _, b in datum.h_plus_minus]
    return obj


def load(path) -> HodgeDatum:
    with open(path) as fh:
        return from_dict(json.load(fh))


def dump(datum: HodgeDatum, path) -> None:
    Path(path).write_text(json.dumps(to_dict(datum), indent=2) + "\n")


SHIPPED = ("point", "elliptic_curve", "p1", "abelian_surface", "k3")


def shipped(name: str) -> HodgeDatum:
    """One of the example varieties bundled with the package."""
    if name not in SHIPPED:
        raise KeyError(f"no shipped datum {name!r}; choose from {', '.join(SHIPPED)}")
    text = resources.files("arinfinity").joinpath("data").joinpath(f"{name}.json").read_text()
    return from_dict(json.loads(text))


def shipped_all() -> list[HodgeDatum]:
    return [shipped(name) for name in SHIPPED]


def resolve(spec: str) -> HodgeDatum:
    """Accept either a path to a variety file or the name of a shipped datum."""
    if spec in SHIPPED:
        return shipped(spec)
    return load(spec)
