"""The truncated spectral triple: layers Ker(N^{u+1}) and Coker(N^{u+1}),
the Dirac operator D = Phi on them, and its zeta functions.

In the harmonic model every differential vanishes, so the multiplicity m_r
of the eigenvalue -r is a plain count of basis vectors in both parts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .hodge import HodgeDatum, require_valid
from .lattice import Window, in_region_pqrk, kappa_cut
from .operators import duality_Stilde, frobenius_Phi, lefschetz_L, rep_sigma, sl2_for
from .regdet import check_alternating, hurwitz_zeta, zeta_two_var
from .spectral import Progression, SpectralMeasure
from .tcomplex import GradedSpace, ar_cohomology, build_truncation

STABLE_RUN = 3


def layer(b) -> int:
    """l = k - 2r - m, the position of a basis vector inside its Ker(N^{u+1}) stack."""
    return b.k - 2 * b.r - b.m


@dataclass(frozen=True, eq=False)
class TripleSpace:
    datum: HodgeDatum
    u: int
    window: Window
    full: GradedSpace
    ker_part: GradedSpace
    coker_part: GradedSpace

    @property
    def max_degree(self) -> int:
        return max((p + q for p, q in self.datum.pairs()), default=0)

    def conclusive(self, r: int) -> bool:
        """Both parts at column r fit below kmax and r is inside the window."""
        w = self.window
        return (
            w.rmin <= r <= w.rmax
            and 2 * r + self.max_degree + self.u <= w.kmax
            and self.u <= w.kmax
        )

    def conclusive_range(self) -> list[int]:
        return [r for r in range(self.window.rmin, self.window.rmax + 1) if self.conclusive(r)]


def build_Tu(datum: HodgeDatum, u: int, window: Window) -> TripleSpace:
    if u < 0:
        raise ValueError("u must be nonnegative")
    full = build_truncation(datum, window)
    ker = full.restrict(lambda b: 0 <= layer(b) <= u)
    coker = full.restrict(lambda b: b.k <= u)
    return TripleSpace(datum, u, window, full, ker, coker)


def layer_table(tu: TripleSpace) -> list[dict]:
    """One row per basis vector of either part (the CSV export of the layers)."""
    rows = []
    for part, space in (("ker", tu.ker_part), ("coker", tu.coker_part)):
        for b in space.basis:
            rows.append({"part": part, "p": b.p, "q": b.q, "r": b.r, "k": b.k, "slot": b.slot,
                         "layer": layer(b), "degree": b.degree + (1 if part == "coker" else 0)})
    return rows


# ---------------------------------------------------------------- multiplicities


def ker_count(p: int, q: int, r: int, u: int) -> int:
    """#{k : (r, k) in the region, 0 <= k - 2r - m <= u}, straight from the region test."""
    m = p + q
    return sum(1 for k in range(max(0, 2 * r + m), 2 * r + m + u + 1) if in_region_pqrk(p, q, r, k))


def coker_count(p: int, q: int, r: int, u: int) -> int:
    return sum(1 for k in range(0, u + 1) if in_region_pqrk(p, q, r, k))


def multiplicity(datum: HodgeDatum, u: int, r: int) -> tuple[int, int]:
    """(m_r, sigma^L(w)^2-weighted m_r) computed from the region, no window involved."""
    n = datum.n
    mult = weighted = 0
    for p, q in datum.pairs():
        c = datum.h[p][q] * (ker_count(p, q, r, u) + coker_count(p, q, r, u))
        mult += c
        weighted += c if (n + p + q) % 2 == 0 else -c
    return mult, weighted


@dataclass
class DiracSpectrum:
    measure: SpectralMeasure  # eigenvalues -r, head = conclusive range, tails when detected
    multiplicities: dict  # r -> m_r over the conclusive range
    weighted: dict  # r -> sigma^L(w)^2 trace
    inconclusive: list
    upper_tail: tuple | None  # (first r of the constant run, m, weighted)
    lower_tail: tuple | None
    zero_modes: int

    @property
    def stabilized(self) -> bool:
        return self.upper_tail is not None and self.lower_tail is not None


def _stable_edge(rs, mult, weighted, upper: bool):
    if len(rs) < STABLE_RUN:
        return None
    edge = rs[-STABLE_RUN:] if upper else rs[:STABLE_RUN]
    vals = {(mult[r], weighted[r]) for r in edge}
    if len(vals) != 1:
        return None
    (m, w), = vals
    return (edge[0] if upper else edge[-1], m, w)


def dirac_spectrum(tu: TripleSpace, r_range=None) -> DiracSpectrum:
    """Multiplicities of D = Phi from the window bases of both parts."""
    n = tu.datum.n
    requested = tu.conclusive_range() if r_range is None else list(r_range)
    good = [r for r in requested if tu.conclusive(r)]
    bad = [r for r in requested if not tu.conclusive(r)]
    counts: Counter = Counter()
    signed: Counter = Counter()
    for space in (tu.ker_part, tu.coker_part):
        for b in space.basis:
            counts[b.r] += 1
            signed[b.r] += 1 if (n + b.m) % 2 == 0 else -1
    mult = {r: counts[r] for r in good}
    weighted = {r: signed[r] for r in good}
    good_sorted = sorted(good)
    contiguous = good_sorted == list(range(good_sorted[0], good_sorted[-1] + 1)) if good_sorted else False
    upper = _stable_edge(good_sorted, mult, weighted, True) if contiguous else None
    lower = _stable_edge(good_sorted, mult, weighted, False) if contiguous else None
    head = {-r: [(m, {"identity": m, "sigmaL_w2": weighted[r]})] for r, m in mult.items() if m}
    tails = []
    if upper and lower and upper[1] and lower[1]:
        # r > rmax_conclusive: eigenvalues -r descending; r < rmin_conclusive: ascending
        hi, lo = good_sorted[-1], good_sorted[0]
        tails.append(Progression(-(hi + 1), -1, upper[1], {"identity": upper[1], "sigmaL_w2": upper[2]}))
        tails.append(Progression(-(lo - 1), 1, lower[1], {"identity": lower[1], "sigmaL_w2": lower[2]}))
    measure = SpectralMeasure.from_parts(head, tails)
    return DiracSpectrum(measure, mult, weighted, bad, upper, lower, mult.get(0, 0))


def multiplicity_bound(tu: TripleSpace) -> int:
    return (tu.u + 1) * tu.datum.total_dim()


# ---------------------------------------------------------------- zeta functions


class WindowTooSmall(ValueError):
    """The multiplicities do not visibly stabilize inside the conclusive range."""


def _require_tails(spec: DiracSpectrum):
    if not spec.stabilized:
        raise WindowTooSmall("multiplicities do not stabilize inside the window; enlarge it")


def zeta_dirac(tu: TripleSpace, z: complex, observable: str = "identity", spec: DiracSpectrum | None = None) -> complex:
    """sum over r != 0 of Tr(a Pi_{-r}) |r|^(-z); zero modes are left out."""
    spec = spec or dirac_spectrum(tu)
    _require_tails(spec)
    rs = sorted(spec.multiplicities)
    lo, hi = rs[0], rs[-1]
    weights = spec.multiplicities if observable == "identity" else spec.weighted
    if observable not in ("identity", "sigmaL_w2"):
        weights = {r: 0 for r in rs}
    total = sum(complex(w) * abs(r) ** (-complex(z)) for r, w in weights.items() if r != 0 and w)
    up = spec.upper_tail[1] if observable == "identity" else spec.upper_tail[2]
    down = spec.lower_tail[1] if observable == "identity" else spec.lower_tail[2]
    if observable not in ("identity", "sigmaL_w2"):
        up = down = 0
    if hi < 0 or lo > 0:
        raise WindowTooSmall("conclusive range must straddle r = 0")
    if up:
        total += up * hurwitz_zeta(z, hi + 1)
    if down:
        total += down * hurwitz_zeta(z, -lo + 1)
    return total


def zeta_dirac_two_var(tu: TripleSpace, observable: str, s: complex, z: complex,
                       spec: DiracSpectrum | None = None) -> complex:
    spec = spec or dirac_spectrum(tu)
    _require_tails(spec)
    return zeta_two_var(spec.measure, observable, s, z)


def zeta_dirac_direct(datum: HodgeDatum, u: int, z: float, cutoff: int = 10_000) -> float:
    """Independent path: lattice multiplicities for |r| <= cutoff plus mpmath tails.

    Beyond the cutoff m_r is constant, as the closed form of the region shows,
    so the remainder is m * (zeta(z, cutoff + 1)) in each direction.
    """
    import mpmath

    total = mpmath.mpf(0)
    for r in range(1, cutoff + 1):
        total += multiplicity(datum, u, r)[0] * mpmath.power(r, -z)
        total += multiplicity(datum, u, -r)[0] * mpmath.power(r, -z)
    up = multiplicity(datum, u, cutoff)[0]
    down = multiplicity(datum, u, -cutoff)[0]
    total += (up + down) * mpmath.zeta(z, cutoff + 1)
    return float(total)


def dimension_spectrum_probe(tu: TripleSpace, delta: float = 1e-4) -> dict:
    """Locate the pole of zeta_D at z = 1 and estimate its residue numerically."""
    spec = dirac_spectrum(tu)
    if not spec.stabilized:
        return {"status": "window too small", "poles": [], "conclusive_range": tu.conclusive_range()}
    predicted = spec.upper_tail[1] + spec.lower_tail[1]
    numeric = 0.5 * ((delta) * zeta_dirac(tu, 1 + delta, spec=spec) + (-delta) * zeta_dirac(tu, 1 - delta, spec=spec))
    poles = []
    if predicted:
        poles.append({"z": 1, "order": 1, "residue": predicted, "numeric_residue": numeric.real})
    return {
        "status": "ok",
        "poles": poles,
        "zero_modes": spec.zero_modes,
        "tails": {"upper": spec.upper_tail, "lower": spec.lower_tail},
        "conclusive_range": [min(spec.multiplicities), max(spec.multiplicities)],
    }


# ---------------------------------------------------------------- structure checks


def sigma_l_stability(tu: TripleSpace) -> dict:
    """L and S~ keep each part inside itself (on columns that stay in the window)."""
    sl2 = sl2_for(tu.datum)
    space = tu.full
    ops = {"L": lefschetz_L(space, sl2), "Stilde": duality_Stilde(space, sl2)}
    out = {}
    for part_name, part in (("ker", tu.ker_part), ("coker", tu.coker_part)):
        members = {space.position[b] for b in part.basis}
        for op_name, op in ops.items():
            checked = violations = 0
            for c in members:
                if c in op.escaping:
                    continue
                checked += 1
                if any(row not in members for row in op.column(c)):
                    violations += 1
            out[f"{op_name} on {part_name}"] = {"checked": checked, "violations": violations}
    out["ok"] = all(v["violations"] == 0 for k, v in out.items() if isinstance(v, dict))
    return out


def commutator_bound(datum: HodgeDatum, windows, lam=2, s=1) -> dict:
    """max |[Phi, X]_ij| / |X_ij| over generators X of sigma^L, per window; bounded by n."""
    rows = []
    for window in windows:
        space = build_truncation(datum, window)
        sl2 = sl2_for(datum)
        Phi = frobenius_Phi(space)
        worst = 0.0
        for name, X in (("chi", rep_sigma(space, "L", "chi", lam, sl2)),
                        ("u", rep_sigma(space, "L", "u", s, sl2)),
                        ("w", rep_sigma(space, "L", "w", sl2=sl2))):
            C = Phi.commutator(X)
            for c, col in C.cols.items():
                if c in C.escaping:
                    continue
                for r, v in col.items():
                    x = X.column(c).get(r, 0)
                    ratio = abs(complex(v)) / abs(complex(x)) if x != 0 else float("inf")
                    worst = max(worst, ratio)
        rows.append({"window": window.as_dict(), "max_ratio": worst})
    bound = datum.n
    return {"rows": rows, "bound": bound, "ok": all(r["max_ratio"] <= bound for r in rows)}


def connect_prop_zetaL(datum: HodgeDatum, s_grid, window: Window | None = None, tol: float = 1e-7) -> dict:
    """Spec(Phi_0) from the bottom layer of Ker N at u = 0 against the cohomology model,
    then the alternating determinant identity."""
    require_valid(datum)
    window = window or Window(-6, 6, 12)
    tu = build_Tu(datum, 0, window)
    mismatches = []
    for m in range(2 * datum.n + 1):
        from_layers: Counter = Counter()
        rs = set()
        for b in tu.ker_part.basis:
            if b.m == m and layer(b) == 0 and b.k >= abs(b.p - b.q) and tu.conclusive(b.r):
                from_layers[-b.r] += 1
        for r in tu.conclusive_range():
            rs.add(-r)
        lmax = max(rs) - min(rs) + 2 * datum.n + 1 if rs else 0
        model = ar_cohomology(datum, m, lmax=lmax)
        expected = Counter({lam: e.multiplicity for lam, e in model.head.items() if lam in rs})
        if from_layers != expected:
            mismatches.append({"m": m, "layers": dict(from_layers), "model": dict(expected)})
    det = check_alternating(datum, s_grid, tol=tol)
    return {"spectrum_match": not mismatches, "mismatches": mismatches, "determinant": det,
            "ok": not mismatches and det["ok"]}
