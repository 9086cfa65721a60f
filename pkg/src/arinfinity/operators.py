"""Exact sparse operators on truncations: N, Phi, L, the dualities, sigma^L/R.

Every operator is column-sparse over the basis of one :class:`GradedSpace`.
Truncation is tracked rather than hidden: a column whose true image has a
component outside the window is recorded in ``escaping``, and identities
are only compared on columns that escape in neither side.  ``adj_escaping``
plays the same role for the adjoint (columns that would receive entries
from basis vectors outside the window).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .hodge import HodgeDatum, StringSlot, lefschetz_slots
from .lattice import in_region_pqrk
from .scalars import GaussianRational, conj, i_power
from .tcomplex import GradedSpace


class PartialOperatorError(ValueError):
    """The window is not closed under a reflection; lists the escaping indices."""

    def __init__(self, name, escaping):
        self.escaping = sorted(escaping)
        preview = ", ".join(str(tuple(b)) for b in self.escaping[:5])
        more = "" if len(self.escaping) <= 5 else f" (+{len(self.escaping) - 5} more)"
        super().__init__(f"{name}: {len(self.escaping)} basis vectors leave the window: {preview}{more}")


class SparseOperator:
    def __init__(self, space: GradedSpace, cols=None, escaping=(), adj_escaping=(), name=""):
        self.space = space
        self.cols = {c: dict(col) for c, col in (cols or {}).items() if col}
        self.escaping = frozenset(escaping)
        self.adj_escaping = frozenset(adj_escaping)
        self.name = name

    # -- construction helpers
    @classmethod
    def identity(cls, space, name="1"):
        return cls(space, {i: {i: 1} for i in range(space.dim)}, name=name)

    @classmethod
    def diagonal(cls, space, fn, name=""):
        cols = {}
        for i, b in enumerate(space.basis):
            v = fn(b)
            if v != 0:
                cols[i] = {i: v}
        return cls(space, cols, name=name)

    @classmethod
    def from_shift(cls, space, target, coeff=lambda b: 1, source=None, name=""):
        """Monomial operator b -> coeff(b) * target(b).

        ``target`` returns a basis tuple or None (the image vanishes in the
        complex).  A target outside the window marks the column escaping.
        ``source`` is the inverse shift; when given, columns whose preimage
        lies in the complex but outside the window go to ``adj_escaping``.
        """
        cols, escaping, adj_escaping = {}, set(), set()
        for i, b in enumerate(space.basis):
            t = target(b)
            if t is not None:
                j = space.position.get(t)
                if j is None:
                    escaping.add(i)
                else:
                    c = coeff(b)
                    if c != 0:
                        cols[i] = {j: c}
            if source is not None:
                s = source(b)
                if s is not None and s not in space.position:
                    adj_escaping.add(i)
        return cls(space, cols, escaping, adj_escaping, name)

    # -- algebra
    def column(self, c) -> dict:
        return self.cols.get(c, {})

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        cols, escaping = {}, set(other.escaping)
        for c, col in other.cols.items():
            out = {}
            for r, v in col.items():
                if r in self.escaping:
                    escaping.add(c)
                for r2, w in self.cols.get(r, {}).items():
                    out[r2] = out.get(r2, 0) + w * v
            cols[c] = {k: v for k, v in out.items() if v != 0}
        # (AB)* = B* A*: column c of A* lists the rows of A in row c
        adj = set(self.adj_escaping)
        if other.adj_escaping:
            for c, col in self.cols.items():
                if c in other.adj_escaping:
                    adj.update(col.keys())
        return SparseOperator(self.space, cols, escaping, adj, f"({self.name}{other.name})")

    def _combine(self, other, sign):
        self._check(other)
        cols = {c: dict(col) for c, col in self.cols.items()}
        for c, col in other.cols.items():
            tgt = cols.setdefault(c, {})
            for r, v in col.items():
                tgt[r] = tgt.get(r, 0) + sign * v
        cols = {c: {r: v for r, v in col.items() if v != 0} for c, col in cols.items()}
        return SparseOperator(
            self.space, cols, self.escaping | other.escaping, self.adj_escaping | other.adj_escaping
        )

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, factor) -> "SparseOperator":
        cols = {c: {r: factor * v for r, v in col.items()} for c, col in self.cols.items()}
        return SparseOperator(self.space, cols, self.escaping, self.adj_escaping, self.name)

    __rmul__ = scale

    def __neg__(self):
        return self.scale(-1)

    def adjoint(self) -> "SparseOperator":
        cols: dict = {}
        for c, col in self.cols.items():
            for r, v in col.items():
                cols.setdefault(r, {})[c] = conj(v)
        return SparseOperator(self.space, cols, self.adj_escaping, self.escaping, f"{self.name}*")

    def power(self, e: int) -> "SparseOperator":
        out = SparseOperator.identity(self.space)
        for _ in range(e):
            out = self @ out
        return out

    def exp_nilpotent(self, s=1) -> "SparseOperator":
        """exp(s*A) for a window-nilpotent A; the series stops at the first zero power."""
        out = SparseOperator.identity(self.space)
        term = SparseOperator.identity(self.space)
        for k in range(1, self.space.dim + 2):
            term = (self @ term).scale(Fraction(1, k) * s if isinstance(s, (int, Fraction)) else s / k)
            if not term.cols:
                # escaping information of the last (zero) power still matters
                return SparseOperator(
                    self.space, out.cols, out.escaping | term.escaping, out.adj_escaping | term.adj_escaping
                )
            out = out + term
        raise ArithmeticError("operator is not nilpotent on this window")

    def commutator(self, other):
        return self @ other - other @ self

    def _check(self, other):
        if other.space is not self.space:
            raise ValueError("operators live on different truncations")

    # -- inspection
    @property
    def interior(self) -> frozenset:
        return frozenset(range(self.space.dim)) - self.escaping

    def is_zero_on(self, columns) -> bool:
        return all(not self.cols.get(c) for c in columns)

    def compare(self, other, columns=None):
        """Max |entry difference| over columns trusted by both operators."""
        trusted = (self.interior & other.interior) if columns is None else frozenset(columns)
        trusted = trusted - self.escaping - other.escaping
        worst, first_bad = 0.0, None
        for c in sorted(trusted):
            a, b = self.cols.get(c, {}), other.cols.get(c, {})
            for r in set(a) | set(b):
                d = a.get(r, 0) - b.get(r, 0)
                if d != 0:
                    mag = abs(complex(d)) if not isinstance(d, float) else abs(d)
                    if mag > worst:
                        worst = mag
                    if first_bad is None:
                        first_bad = (self.space.basis[c], self.space.basis[r])
        return worst, len(trusted), first_bad

    def equals(self, other, columns=None) -> bool:
        worst, _, _ = self.compare(other, columns)
        return worst == 0

    def nnz(self) -> int:
        return sum(len(col) for col in self.cols.values())

    def to_dense(self, dtype=complex):
        import numpy as np

        out = np.zeros((self.space.dim, self.space.dim), dtype=dtype)
        for c, col in self.cols.items():
            for r, v in col.items():
                out[r, c] = complex(v) if dtype is complex else float(v)
        return out


# ---------------------------------------------------------------- sl(2) data


@dataclass(frozen=True, eq=False)
class Sl2Structure:
    """Lefschetz strings of a Hodge datum in the Jordan-basis convention.

    Raising coefficient 1 along each string, lowering j(d - j + 1) from rung
    j, weight m - n on degree m.  ``weyl[d]`` holds the per-rung
    coefficients of exp(e) exp(-f) exp(e), which sends rung j to rung d - j.
    """

    datum: HodgeDatum
    slots: dict
    slot_index: dict
    weyl: dict

    @classmethod
    def from_datum(cls, datum: HodgeDatum) -> "Sl2Structure":
        slots = lefschetz_slots(datum)
        slot_index = {}
        for (p, q), lst in slots.items():
            for i, s in enumerate(lst):
                slot_index[(s.anchor, s.index, s.rung)] = ((p, q), i)
        weyl = {d: weyl_coefficients(d) for d in range(datum.n + 1)}
        return cls(datum, slots, slot_index, weyl)

    def slot(self, p, q, slot) -> StringSlot:
        return self.slots[(p, q)][slot]

    def move(self, b, dj):
        """Basis tuple dj rungs along the string of b (r shifts by -dj), or None."""
        s = self.slot(b.p, b.q, b.slot)
        j = s.rung + dj
        if not 0 <= j <= s.length:
            return None
        (p2, q2), i2 = self.slot_index[(s.anchor, s.index, j)]
        return type(b)(p2, q2, b.r - dj, b.k, i2)


def weyl_coefficients(d: int) -> dict:
    """exp(e) exp(-f) exp(e) on the irreducible (d+1)-dim module: j -> c_j v_{d-j}."""
    size = d + 1
    e = [[Fraction(0)] * size for _ in range(size)]
    f = [[Fraction(0)] * size for _ in range(size)]
    for j in range(size - 1):
        e[j + 1][j] = Fraction(1)
    for j in range(1, size):
        f[j - 1][j] = Fraction(j * (d - j + 1))

    def mul(a, b):
        return [[sum(a[i][t] * b[t][k] for t in range(size)) for k in range(size)] for i in range(size)]

    def expm(a, s):
        out = [[Fraction(int(i == k)) for k in range(size)] for i in range(size)]
        term = [row[:] for row in out]
        for t in range(1, size + 1):
            term = [[x * s / t for x in row] for row in mul(a, term)]
            out = [[out[i][k] + term[i][k] for k in range(size)] for i in range(size)]
        return out

    w = mul(mul(expm(e, 1), expm(f, -1)), expm(e, 1))
    coeffs = {}
    for j in range(size):
        for i in range(size):
            if w[i][j] != 0:
                assert i == d - j, "Weyl element must be monomial"
                coeffs[j] = w[i][j]
    return coeffs


# ---------------------------------------------------------------- the operators


@lru_cache(maxsize=32)
def sl2_for(datum: HodgeDatum) -> Sl2Structure:
    return Sl2Structure.from_datum(datum)


def _n_target(b):
    if in_region_pqrk(b.p, b.q, b.r + 1, b.k + 1):
        return type(b)(b.p, b.q, b.r + 1, b.k + 1, b.slot)
    return None


def _n_source(b):
    if in_region_pqrk(b.p, b.q, b.r - 1, b.k - 1):
        return type(b)(b.p, b.q, b.r - 1, b.k - 1, b.slot)
    return None


@lru_cache(maxsize=64)
def monodromy_N(space: GradedSpace) -> SparseOperator:
    """N = U hbar: (r, k) -> (r+1, k+1), zero when the target leaves the region."""
    return SparseOperator.from_shift(space, _n_target, source=_n_source, name="N")


@lru_cache(maxsize=64)
def monodromy_N_adjoint(space: GradedSpace) -> SparseOperator:
    return monodromy_N(space).adjoint()


@lru_cache(maxsize=64)
def frobenius_Phi(space: GradedSpace) -> SparseOperator:
    """Phi = -U d/dU: eigenvalue -r."""
    return SparseOperator.diagonal(space, lambda b: -b.r, name="Phi")


def weight_H(space: GradedSpace) -> SparseOperator:
    n = space.datum.n
    return SparseOperator.diagonal(space, lambda b: b.m - n, name="H")


@lru_cache(maxsize=64)
def lefschetz_L(space: GradedSpace, sl2: Sl2Structure | None = None) -> SparseOperator:
    """L = (. ^ omega) U^{-1}: one rung up its string, (p, q, r) -> (p+1, q+1, r-1)."""
    if sl2 is None:
        raise ValueError("the Lefschetz operator needs an Sl2Structure")
    return SparseOperator.from_shift(
        space, lambda b: sl2.move(b, 1), source=lambda b: sl2.move(b, -1), name="L"
    )


def lefschetz_adjoint(L: SparseOperator) -> SparseOperator:
    """Inner-product adjoint of L: (p, q, r) -> (p-1, q-1, r+1)."""
    return L.adjoint()


@lru_cache(maxsize=64)
def lefschetz_lowering(space: GradedSpace, sl2: Sl2Structure) -> SparseOperator:
    """sl(2) partner of L: rung j -> j-1 with coefficient j(d - j + 1)."""

    def coeff(b):
        s = sl2.slot(b.p, b.q, b.slot)
        return s.rung * (s.length - s.rung + 1)

    return SparseOperator.from_shift(
        space, lambda b: sl2.move(b, -1), coeff, source=lambda b: sl2.move(b, 1), name="Lflat"
    )


def c_operator(space: GradedSpace) -> SparseOperator:
    """C = (sqrt(-1))^{p-q} on the (p, q) piece."""
    return SparseOperator.diagonal(space, lambda b: i_power(b.p - b.q), name="C")


def _s_target(b):
    m = b.m
    return type(b)(b.p, b.q, -(b.r + m), b.k - 2 * b.r - m, b.slot)


@lru_cache(maxsize=64)
def _duality_S(space):
    return SparseOperator.from_shift(space, _s_target, source=_s_target, name="S")


def duality_S(space: GradedSpace, strict: bool = False) -> SparseOperator:
    """S: alpha U^r hbar^{2r+m+l} -> alpha U^{-(r+m)} hbar^l."""
    op = _duality_S(space)
    if strict and op.escaping:
        raise PartialOperatorError("S", [space.basis[i] for i in op.escaping])
    return op


@lru_cache(maxsize=64)
def weyl_operator(space: GradedSpace, sl2: Sl2Structure) -> SparseOperator:
    """Per-string Weyl element exp(L) exp(-Lflat) exp(L); this is sigma^L(w).

    A string is used only when every rung lies in the window; basis vectors
    of truncated strings are marked escaping.
    """
    def target(b):
        s = sl2.slot(b.p, b.q, b.slot)
        return sl2.move(b, s.length - 2 * s.rung)

    def coeff(b):
        s = sl2.slot(b.p, b.q, b.slot)
        return sl2.weyl[s.length][s.rung]

    op = SparseOperator.from_shift(space, target, coeff, source=target, name="W")
    # a string is only trusted if it is complete inside the window
    broken = set()
    for i, b in enumerate(space.basis):
        s = sl2.slot(b.p, b.q, b.slot)
        for dj in range(-s.rung, s.length - s.rung + 1):
            if sl2.move(b, dj) not in space.position:
                broken.add(i)
                break
    for i in broken:
        op.cols.pop(i, None)
    return SparseOperator(space, op.cols, op.escaping | broken, op.adj_escaping | broken, "W")


def duality_Stilde(space: GradedSpace, sl2: Sl2Structure, strict: bool = False) -> SparseOperator:
    """S~ = (sqrt(-1))^{-n} C^{-1} W, acting on indices as (p,q,r,k) -> (n-q, n-p, r-(n-m), k)."""
    n = space.datum.n
    cinv = SparseOperator.diagonal(space, lambda b: i_power(-(b.p - b.q) - n), name="")
    op = cinv @ weyl_operator(space, sl2)
    op.name = "Stilde"
    if strict and op.escaping:
        raise PartialOperatorError("Stilde", [space.basis[i] for i in op.escaping])
    return op


def stilde_string_constants(space: GradedSpace, sl2: Sl2Structure) -> dict:
    """S~ v = c * L^{n-m} v on each primitive rung; returns {(anchor, index, r, k): c}."""
    st = duality_Stilde(space, sl2)
    L = lefschetz_L(space, sl2)
    out = {}
    for i, b in enumerate(space.basis):
        s = sl2.slot(b.p, b.q, b.slot)
        if s.rung != 0 or i in st.escaping:
            continue
        lhs = st.column(i)
        rhs = L.power(s.length).column(i) if s.length else {i: 1}
        (row, val), = lhs.items()
        if set(rhs) != {row}:
            raise AssertionError(f"S~ and L^(n-m) disagree in direction at {b}")
        out[(s.anchor, s.index, b.r, b.k)] = val / rhs[row]
    return out


# ---------------------------------------------------------------- representations


def _as_exact(x):
    if isinstance(x, (int, Fraction, GaussianRational)):
        return x
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact mode needs a rational parameter, got {x!r}")


def rep_sigma(space: GradedSpace, side: str, element: str, param=None, sl2=None) -> SparseOperator:
    """sigma^L or sigma^R of chi(lambda), u(s) or w.

    L side: chi(l) = l^{m-n}, u(s) = exp(sL), w = W (the Weyl element,
    equal to (sqrt(-1))^n C S~).  R side: chi(l) = l^{2r+m}, u(s) = exp(sN),
    w = C S.
    """
    n = space.datum.n
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    if side == "L" and sl2 is None:
        sl2 = sl2_for(space.datum)
    if element == "chi":
        lam = _as_exact(param)
        if lam == 0:
            raise ValueError("chi(0) is not in SL(2)")
        if side == "L":
            return SparseOperator.diagonal(space, lambda b: Fraction(lam) ** (b.m - n), "chiL")
        return SparseOperator.diagonal(space, lambda b: Fraction(lam) ** (2 * b.r + b.m), "chiR")
    if element == "u":
        s = _as_exact(param)
        gen = lefschetz_L(space, sl2) if side == "L" else monodromy_N(space)
        return gen.exp_nilpotent(s)
    if element == "w":
        if side == "L":
            return weyl_operator(space, sl2)
        return c_operator(space) @ duality_S(space)
    raise ValueError(f"unknown group element {element!r}")


# ---------------------------------------------------------------- relation suite


@dataclass
class RelationResult:
    name: str
    passed: bool
    residual: float
    checked: int
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "residual": self.residual,
                "checked": self.checked, "detail": self.detail}


def _result(name, lhs, rhs, detail=""):
    worst, checked, bad = lhs.compare(rhs)
    info = detail if bad is None else f"{detail} first mismatch at column {bad[0]} row {bad[1]}".strip()
    return RelationResult(name, worst == 0, worst, checked, info)


DEFAULT_SAMPLES = (
    (Fraction(1), Fraction(0)),
    (Fraction(-1), Fraction(1)),
    (Fraction(2), Fraction(-2)),
    (Fraction(-2), Fraction(5, 3)),
    (Fraction(3, 2), Fraction(1)),
)


def lang_relations(space: GradedSpace, lambdas, ss, side: str, sl2=None) -> list[RelationResult]:
    """Both SL(2) relations for one side, on every (lambda, s) combination."""
    out = []
    w = rep_sigma(space, side, "w", sl2=sl2)
    out.append(_result(f"sigma^{side}(w)^2 = sigma^{side}(chi(-1))", w @ w, rep_sigma(space, side, "chi", -1, sl2)))
    for lam in lambdas:
        chi = rep_sigma(space, side, "chi", lam, sl2)
        chi_inv = rep_sigma(space, side, "chi", 1 / Fraction(lam), sl2)
        for s in ss:
            lhs = chi @ rep_sigma(space, side, "u", s, sl2) @ chi_inv
            rhs = rep_sigma(space, side, "u", Fraction(s) * Fraction(lam) ** 2, sl2)
            out.append(_result(f"sigma^{side}: chi({lam}) u({s}) chi({lam})^-1 = u({s}*{lam}^2)", lhs, rhs))
    return out


def weyl_algebra_relations(space: GradedSpace, sl2=None) -> list[RelationResult]:
    sl2 = sl2 or sl2_for(space.datum)
    N, Phi, L = monodromy_N(space), frobenius_Phi(space), lefschetz_L(space, sl2)
    return [
        _result("[Phi,N] = -N", Phi.commutator(N), -N),
        _result("[Phi,L] = L", Phi.commutator(L), L),
        _result("[L,N] = 0", L.commutator(N), SparseOperator(space)),
    ]


def sl2_relations(space: GradedSpace, sl2=None) -> list[RelationResult]:
    sl2 = sl2 or sl2_for(space.datum)
    L, Lf, H = lefschetz_L(space, sl2), lefschetz_lowering(space, sl2), weight_H(space)
    W = weyl_operator(space, sl2)
    Winv = W @ W @ W  # W^4 = 1
    return [
        _result("[L,Lflat] = H", L.commutator(Lf), H),
        _result("[H,L] = 2L", H.commutator(L), L.scale(2)),
        _result("[H,Lflat] = -2Lflat", H.commutator(Lf), Lf.scale(-2)),
        _result("W^-1 L W = -Lflat", Winv @ L @ W, -Lf),
    ]


def duality_relations(space: GradedSpace, sl2=None) -> list[RelationResult]:
    sl2 = sl2 or sl2_for(space.datum)
    S = duality_S(space)
    St = duality_Stilde(space, sl2)
    one = SparseOperator.identity(space)
    out = [_result("S^2 = 1", S @ S, one), _result("S~^2 = 1", St @ St, one)]
    # S = N^{-(2r+m)} on span{alpha U^r hbar^{2r+m+l}}
    N = monodromy_N(space)
    powers = {0: one}
    worst, checked, bad = 0, 0, None
    for i, b in enumerate(space.basis):
        if i in S.escaping:
            continue
        a = 2 * b.r + b.m
        e = abs(a)
        if e not in powers:
            powers[e] = N.power(e)
        Ne = powers[e]
        if a <= 0:
            if i in Ne.escaping:
                continue
            ok = Ne.column(i) == S.column(i)
        else:
            (j, _), = S.column(i).items()
            if j in Ne.escaping:
                continue
            ok = Ne.column(j) == {i: 1}
        checked += 1
        if not ok:
            worst = 1
            bad = bad or b
    out.append(RelationResult("S = N^-(2r+m) on each span", worst == 0, float(worst), checked,
                              "" if bad is None else f"mismatch at {bad}"))
    consts = stilde_string_constants(space, sl2)
    nonzero = all(c != 0 for c in consts.values())
    distinct = sorted({repr(c) for c in consts.values()})
    out.append(RelationResult("S~ = c L^(n-m) on primitive rungs, c != 0", nonzero, 0.0 if nonzero else 1.0,
                              len(consts), "constants: " + ", ".join(distinct)))
    return out


def commuting_relations(space: GradedSpace, samples=DEFAULT_SAMPLES, sl2=None) -> list[RelationResult]:
    """sigma^L and sigma^R generators commute."""
    sl2 = sl2 or sl2_for(space.datum)
    lam, s = samples[-1]
    left = [("chiL", rep_sigma(space, "L", "chi", lam, sl2)), ("uL", rep_sigma(space, "L", "u", s, sl2)),
            ("wL", rep_sigma(space, "L", "w", sl2=sl2))]
    right = [("chiR", rep_sigma(space, "R", "chi", lam)), ("uR", rep_sigma(space, "R", "u", s)),
             ("wR", rep_sigma(space, "R", "w"))]
    return [_result(f"[{a},{b}] = 0", A @ B, B @ A) for a, A in left for b, B in right]


def projection_relations(space: GradedSpace) -> list[RelationResult]:
    """N*N and NN* are orthogonal projections."""
    N = monodromy_N(space)
    Ns = N.adjoint()
    out = []
    for name, P in (("N*N", Ns @ N), ("NN*", N @ Ns)):
        out.append(_result(f"{name} idempotent", P @ P, P))
        out.append(_result(f"{name} self-adjoint", P.adjoint(), P))
    return out


def frobenius_flow_relation(space: GradedSpace, t: float = 1.0, tol: float = 1e-12) -> RelationResult:
    """F_t N F_t^{-1} = e^{-t} N with F_t = exp(t Phi), entrywise relative error."""
    N = monodromy_N(space)
    target = math.exp(-t)
    worst, checked = 0.0, 0
    for c, col in N.cols.items():
        if c in N.escaping:
            continue
        rc = space.basis[c].r
        for r, v in col.items():
            rr = space.basis[r].r
            lhs = math.exp(-t * rr) * float(v) * math.exp(t * rc)
            rel = abs(lhs - target * float(v)) / abs(target * float(v))
            worst = max(worst, rel)
            checked += 1
    return RelationResult(f"F_{t} N F_{t}^-1 = e^-{t} N", worst <= tol, worst, checked, f"tol {tol:g}")


def check_relations(space: GradedSpace, samples=DEFAULT_SAMPLES, groups=("sl2", "weyl", "fn", "dualities")) -> dict:
    sl2 = sl2_for(space.datum)
    lambdas = sorted({lam for lam, _ in samples}, key=lambda x: (abs(x), x))
    ss = sorted({s for _, s in samples})
    results: list[RelationResult] = []
    if "sl2" in groups:
        results += lang_relations(space, lambdas, ss, "L", sl2)
        results += lang_relations(space, lambdas, ss, "R", sl2)
        results += sl2_relations(space, sl2)
        results += commuting_relations(space, samples, sl2)
    if "weyl" in groups:
        results += weyl_algebra_relations(space, sl2)
        results += projection_relations(space)
    if "fn" in groups:
        results.append(frobenius_flow_relation(space))
    if "dualities" in groups:
        results += duality_relations(space, sl2)
    return {"results": results, "ok": all(r.passed for r in results)}
