"""Spectral measures: finite heads plus exact arithmetic-progression tails."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType


@dataclass(frozen=True)
class Progression:
    """Eigenvalues start + step*l for l = 0, 1, 2, ..., each with the same data.

    ``weights`` maps an observable name to Tr(a Pi_lambda) on one eigenvalue
    of the progression; ``multiplicity`` is the dimension of each eigenspace.
    """

    start: object
    step: int
    multiplicity: int
    weights: dict

    def __post_init__(self):
        if self.step not in (-1, 1):
            raise ValueError("progressions have common difference +-1")
        if self.multiplicity <= 0:
            raise ValueError("multiplicity must be positive")
        object.__setattr__(self, "weights", MappingProxyType(dict(self.weights)))

    def eigenvalue(self, ell: int):
        return self.start + self.step * ell

    def weight(self, observable: str):
        if observable == "identity" and "identity" not in self.weights:
            return self.multiplicity
        return self.weights.get(observable, 0)


@dataclass(frozen=True)
class Entry:
    multiplicity: int
    weights: dict

    def weight(self, observable: str):
        if observable == "identity" and "identity" not in self.weights:
            return self.multiplicity
        return self.weights.get(observable, 0)


@dataclass(frozen=True)
class SpectralMeasure:
    head: dict = field(default_factory=dict)
    tails: tuple = ()

    def __post_init__(self):
        for lam, entry in self.head.items():
            if entry.multiplicity <= 0:
                raise ValueError(f"nonpositive multiplicity at eigenvalue {lam}")
        object.__setattr__(self, "head", MappingProxyType(dict(self.head)))
        object.__setattr__(self, "tails", tuple(self.tails))

    @classmethod
    def from_parts(cls, head_lists: dict, tails=()) -> "SpectralMeasure":
        """Build from eigenvalue -> list of (multiplicity, weights) contributions."""
        head = {}
        for lam, parts in head_lists.items():
            mult = 0
            weights: dict = {}
            for mu, w in parts:
                mult += mu
                for key, val in w.items():
                    weights[key] = weights.get(key, 0) + val
            if mult:
                head[lam] = Entry(mult, weights)
        return cls(head, tuple(tails))

    @property
    def is_finite(self) -> bool:
        return not self.tails

    def multiplicities(self) -> dict:
        """Head multiplicities only (tails are infinite)."""
        return {lam: e.multiplicity for lam, e in sorted(self.head.items())}

    def union(self, other: "SpectralMeasure") -> "SpectralMeasure":
        lists = {}
        for src in (self, other):
            for lam, e in src.head.items():
                lists.setdefault(lam, []).append((e.multiplicity, dict(e.weights)))
        return SpectralMeasure.from_parts(lists, self.tails + other.tails)

    def to_json(self) -> dict:
        return {
            "head": [
                {"eigenvalue": _num(lam), "multiplicity": e.multiplicity,
                 "weights": {k: _num(v) for k, v in sorted(e.weights.items())}}
                for lam, e in sorted(self.head.items())
            ],
            "tails": [
                {"start": _num(t.start), "step": t.step, "multiplicity": t.multiplicity,
                 "weights": {k: _num(v) for k, v in sorted(t.weights.items())}}
                for t in self.tails
            ],
        }


def _num(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (int, float)):
        return x
    return str(x)
