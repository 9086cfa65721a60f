"""Finite truncations of the cutoff complex and their dimension bookkeeping.

The differentials vanish on harmonic representatives, so a truncation is
just a graded vector space with an ordered basis ``(p, q, r, k, slot)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

from .hodge import HodgeDatum, require_valid
from .lattice import (
    Window,
    K_to_t_index,
    in_region_pqrk,
    kappa_cut,
    s_reflection,
    t_to_K_index,
)
from .spectral import SpectralMeasure, Progression


class GradedIndex(NamedTuple):
    p: int
    q: int
    r: int
    k: int
    slot: int

    @property
    def m(self) -> int:
        return self.p + self.q

    @property
    def degree(self) -> int:
        return self.p + self.q + 2 * self.r


@dataclass(frozen=True, eq=False)
class GradedSpace:
    datum: HodgeDatum
    window: Window
    basis: tuple
    position: dict = field(repr=False)

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index_of(self, p, q, r, k, slot):
        return self.position.get((p, q, r, k, slot))

    def restrict(self, keep) -> "GradedSpace":
        """Subspace spanned by the basis elements satisfying ``keep``."""
        basis = tuple(b for b in self.basis if keep(b))
        return GradedSpace(self.datum, self.window, basis, {b: i for i, b in enumerate(basis)})


def build_truncation(datum: HodgeDatum, window: Window) -> GradedSpace:
    require_valid(datum)
    basis = []
    if not window.empty:
        for p, q in datum.pairs():
            for r in range(window.rmin, window.rmax + 1):
                for k in range(kappa_cut(p, q, r), window.kmax + 1):
                    for slot in range(datum.h[p][q]):
                        basis.append(GradedIndex(p, q, r, k, slot))
    basis.sort()
    basis = tuple(basis)
    return GradedSpace(datum, window, basis, {b: i for i, b in enumerate(basis)})


def graded_dim(space: GradedSpace, *, degree=None, m_2r=None, pqrk=None) -> int:
    """Count basis elements by total degree, by (m, 2r), or by (p, q, r, k)."""
    if sum(x is not None for x in (degree, m_2r, pqrk)) != 1:
        raise ValueError("give exactly one selector")
    if degree is not None:
        return sum(1 for b in space.basis if b.degree == degree)
    if m_2r is not None:
        m, two_r = m_2r
        return sum(1 for b in space.basis if b.m == m and 2 * b.r == two_r)
    return sum(1 for b in space.basis if (b.p, b.q, b.r, b.k) == tuple(pqrk))


def dims_by_t(space: GradedSpace) -> Counter:
    """Counter keyed by (i, m, 2r)."""
    return Counter((b.degree, b.m, 2 * b.r) for b in space.basis)


def dims_by_K(space: GradedSpace) -> Counter:
    """Counter keyed by (i, j, k) through the index reparameterization."""
    n = space.datum.n
    return Counter(t_to_K_index(b.m, b.r, b.k, n) for b in space.basis)


def k_complex_dim(datum: HodgeDatum, i: int, j: int, k: int) -> int:
    n = datum.n
    if (j + n - i) % 2 or k < max(0, i):
        return 0
    return sum(
        datum.hpq(p, j + n - p) for p in range(j + n + 1) if abs(2 * p - j - n) <= 2 * k - i
    )


def inner_product_weights(space: GradedSpace) -> list[int]:
    """Diagonal of the Gram matrix; harmonic representatives are orthonormal."""
    return [1] * space.dim


def ar_cohomology(datum: HodgeDatum, m: int, lmax: int | None = None) -> SpectralMeasure:
    """Spectrum of Frobenius on the N = 0 part of degree m.

    Eigenvalue min(p, q) - l carries h^{p,q}.  With ``lmax`` the spectrum is
    cut at l <= lmax; without it every (p, q) contributes an exact infinite
    progression.  Observables: ``identity`` and ``sigmaL_w2`` = (-1)^{n+m}.
    """
    if not 0 <= m <= 2 * datum.n:
        raise ValueError(f"degree m={m} outside [0, {2 * datum.n}]")
    sign = -1 if (datum.n + m) % 2 else 1
    head = {}
    tails = []
    for p, q in datum.pairs(m):
        h = datum.h[p][q]
        weights = {"identity": h, "sigmaL_w2": sign * h}
        if lmax is None:
            tails.append(Progression(start=min(p, q), step=-1, multiplicity=h, weights=weights))
        else:
            for ell in range(lmax + 1):
                head.setdefault(min(p, q) - ell, []).append((h, weights))
    return SpectralMeasure.from_parts(head, tails)


def ker_N_at(p: int, q: int, r: int, k: int) -> bool:
    """(r, k) survives in Ker(N): in the region, N pushes it out."""
    return in_region_pqrk(p, q, r, k) and not in_region_pqrk(p, q, r + 1, k + 1)


def coker_N_at(p: int, q: int, r: int, k: int) -> bool:
    """(r, k) survives in Coker(N): in the region, not hit by N."""
    return in_region_pqrk(p, q, r, k) and not in_region_pqrk(p, q, r - 1, k - 1)


@dataclass
class ConePairing:
    p: int
    q: int
    r: int
    ker_point: tuple
    coker_point: tuple
    ker_dim: int
    coker_dim: int
    status: str  # "pass", "fail", "inconclusive"
    reason: str = ""


def cone_cohomology_check(datum: HodgeDatum, window: Window, r_values=None) -> dict:
    """Kernel/cokernel pairing of N across the reflection S, slice by slice.

    For 2r+m > 0 the Ker(N) piece over (r, 2r+m) must match the Coker(N)
    piece over (-(r+m), 0), with S carrying one onto the other.  For
    2r+m < -1 the Ker(N) pieces must be empty.  Without ``r_values`` every r
    whose two points both sit in the window is tested; requested r values
    that fall outside are reported as inconclusive.
    """
    require_valid(datum)
    pairings = []
    for p, q in datum.pairs():
        m = p + q
        h = datum.h[p][q]
        if r_values is None:
            rs = [
                r
                for r in range(window.rmin, window.rmax + 1)
                if 2 * r + m > 0
                and window.contains(r, 2 * r + m)
                and window.contains(-(r + m), 0)
            ]
        else:
            rs = [r for r in r_values if 2 * r + m > 0]
        for r in rs:
            kp, cp = (r, 2 * r + m), (-(r + m), 0)
            if not (window.contains(*kp) and window.contains(*cp)):
                pairings.append(
                    ConePairing(p, q, r, kp, cp, 0, 0, "inconclusive", "pairing leaves the window")
                )
                continue
            kd = h if ker_N_at(p, q, *kp) else 0
            cd = h if coker_N_at(p, q, *cp) else 0
            ok = kd == cd
            if ok and kd:
                ok = s_reflection(m, *kp) == cp and s_reflection(m, *cp) == kp
            pairings.append(ConePairing(p, q, r, kp, cp, kd, cd, "pass" if ok else "fail"))
    # part (2): no Ker(N) survivors below the line 2r + m = -1
    ker_violations = []
    for p, q in datum.pairs():
        m = p + q
        for r in range(window.rmin, window.rmax + 1):
            if 2 * r + m < -1:
                for k in range(0, window.kmax + 1):
                    if ker_N_at(p, q, r, k):
                        ker_violations.append((p, q, r, k))
    counts = Counter(pr.status for pr in pairings)
    return {
        "pairings": pairings,
        "passed": counts["pass"],
        "failed": counts["fail"],
        "inconclusive": counts["inconclusive"],
        "ker_violations_below": ker_violations,
        "ok": counts["fail"] == 0 and not ker_violations,
    }
