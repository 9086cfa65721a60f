"""Integer geometry of the cutoff regions and their index maps.

A point of a slice is ``(p, q, r, k)``: a (p, q)-class twisted by ``U^r``
and ``hbar^k``.  Everything here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Window:
    """Finite box rmin <= r <= rmax, 0 <= k <= kmax."""

    rmin: int
    rmax: int
    kmax: int

    def __post_init__(self):
        if self.kmax < 0:
            raise ValueError(f"kmax must be nonnegative, got {self.kmax}")

    @property
    def empty(self) -> bool:
        return self.rmin > self.rmax

    def contains(self, r: int, k: int) -> bool:
        return self.rmin <= r <= self.rmax and 0 <= k <= self.kmax

    @classmethod
    def parse(cls, text: str) -> "Window":
        rmin, rmax, kmax = (int(x) for x in text.split(","))
        if rmin > rmax:
            raise ValueError(f"window {text!r}: rmin > rmax")
        return cls(rmin, rmax, kmax)

    def as_dict(self) -> dict:
        return {"rmin": self.rmin, "rmax": self.rmax, "kmax": self.kmax}


@dataclass(frozen=True, order=True)
class SlicePoint:
    p: int
    q: int
    r: int
    k: int

    @property
    def m(self) -> int:
        return self.p + self.q

    @property
    def degree(self) -> int:
        """Total degree i = m + 2r."""
        return self.m + 2 * self.r

    @property
    def weight(self) -> int:
        # weight -n - j + i of the matching K^{i,j,k}; n cancels out
        return 2 * self.r


def lambda_cut(q: int, r: int, m: int) -> int:
    return max(0, 2 * r + m, r + q)


def kappa_cut(p: int, q: int, r: int) -> int:
    # (|p-q| + 2r + m) / 2 == r + max(p, q)
    return max(0, 2 * r + p + q, r + max(p, q))


def in_region(pt: SlicePoint) -> bool:
    return pt.k >= kappa_cut(pt.p, pt.q, pt.r)


def in_region_pqrk(p: int, q: int, r: int, k: int) -> bool:
    return k >= kappa_cut(p, q, r)


def enumerate_region(p: int, q: int, window: Window) -> list[SlicePoint]:
    """Members of Lambda_{p,q} inside the window, lexicographic in (r, k)."""
    out = []
    for r in range(window.rmin, window.rmax + 1):
        for k in range(kappa_cut(p, q, r), window.kmax + 1):
            out.append(SlicePoint(p, q, r, k))
    return out


def n_shift_surjective(p: int, q: int, r: int) -> bool:
    """N: T^{m,2r}_{p,q} -> T^{m,2r+2}_{p,q} is onto."""
    return r > -max(p, q)


def n_shift_injective(p: int, q: int, r: int) -> bool:
    return r < -min(p, q)


def n_shift_oracle(p: int, q: int, r: int, kmax: int) -> tuple[bool | None, bool | None]:
    """Brute-force (surjective, injective) verdicts for column r.

    Surjective: every (r, k) of the region has (r-1, k-1) in the region.
    Injective: every (r, k) of the region has (r+1, k+1) in the region.
    Only k <= kmax is scanned; a verdict is None when the column's lower
    boundary (where any failure must sit) is not visible below kmax.
    """
    column = [k for k in range(0, kmax + 1) if in_region_pqrk(p, q, r, k)]
    surjective = all(in_region_pqrk(p, q, r - 1, k - 1) for k in column)
    injective = all(in_region_pqrk(p, q, r + 1, k + 1) for k in column)
    # failures can only occur at k < kappa of the neighbouring column
    if kmax < max(kappa_cut(p, q, r), kappa_cut(p, q, r - 1) + 1):
        surjective = None if surjective else False
    if kmax < max(kappa_cut(p, q, r), kappa_cut(p, q, r + 1) - 1):
        injective = None if injective else False
    return surjective, injective


def t_to_K_index(m: int, r: int, k: int, n: int) -> tuple[int, int, int]:
    return m + 2 * r, m - n, k


def K_to_t_index(i: int, j: int, k: int, n: int) -> tuple[int, int, int]:
    if (n + j - i) % 2:
        raise ValueError(f"n + j - i = {n + j - i} is odd; no matching (m, r)")
    return j + n, -(n + j - i) // 2, k


def s_reflection(m: int, r: int, k: int) -> tuple[int, int]:
    """(r, k) -> (-(r+m), k - 2r - m); needs k >= 2r + m."""
    ell = k - 2 * r - m
    if ell < 0:
        raise ValueError(f"k={k} below the line k = 2r + m = {2 * r + m}")
    return -(r + m), ell


def stilde_reflection(n: int, p: int, q: int, r: int, k: int) -> tuple[int, int, int, int]:
    m = p + q
    return n - q, n - p, r - (n - m), k
