"""Archimedean Gamma factors of Hodge data, carried in logarithmic form."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .hodge import HodgeDatum, require_valid

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LogComplex:
    """exp(log_abs + i*phase) * eps**(-order) near the evaluation point.

    ``order > 0`` is a pole of that order, ``order < 0`` a zero; in both
    cases (log_abs, phase) describe the leading Laurent coefficient.
    """

    log_abs: float
    phase: float = 0.0
    order: int = 0

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        if z == 0:
            raise ValueError("zero has no logarithm; use a negative order instead")
        return cls(math.log(abs(z)), cmath.phase(z))

    @classmethod
    def from_log(cls, w: complex, order: int = 0) -> "LogComplex":
        return cls(w.real, _wrap(w.imag), order)

    @classmethod
    def one(cls) -> "LogComplex":
        return cls(0.0, 0.0, 0)

    @property
    def log(self) -> complex:
        return complex(self.log_abs, self.phase)

    @property
    def is_pole(self) -> bool:
        return self.order > 0

    @property
    def is_finite(self) -> bool:
        return self.order <= 0

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_abs + other.log_abs, _wrap(self.phase + other.phase), self.order + other.order)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_abs - other.log_abs, _wrap(self.phase - other.phase), self.order - other.order)

    def __pow__(self, e: int) -> "LogComplex":
        return LogComplex(self.log_abs * e, _wrap(self.phase * e), self.order * e)

    def to_complex(self) -> complex:
        if self.order > 0:
            raise OverflowError(f"pole of order {self.order}")
        if self.order < 0:
            return 0j
        return cmath.exp(self.log)

    def rel_diff(self, other: "LogComplex") -> float:
        """|self/other - 1| for finite nonzero values of equal order."""
        if self.order != other.order:
            return math.inf
        d = complex(self.log_abs - other.log_abs, _wrap(self.phase - other.phase))
        return abs(cmath.exp(d) - 1)

    def as_dict(self) -> dict:
        return {"log_magnitude": self.log_abs, "phase": self.phase, "pole_order": self.order}


def _wrap(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    return math.pi if t == -math.pi else t


# Lanczos coefficients for g = 7, n = 9
_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _nonpositive_integer(s: complex) -> int | None:
    if s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real):
        return int(-s.real)
    return None


def log_gamma(s: complex) -> complex:
    """A logarithm of Gamma(s), for s away from the poles.

    Only exp(log_gamma(s)) is meaningful: the imaginary part is not the
    continuous branch.
    """
    s = complex(s)
    if _nonpositive_integer(s) is not None:
        raise ValueError(f"Gamma has a pole at {s.real:g}")
    if s.real < 0.5:
        # Gamma(s) Gamma(1-s) = pi / sin(pi s)
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * s)) - log_gamma(1 - s)
    z = s - 1
    x = _LANCZOS[0]
    for i in range(1, _G + 2):
        x += _LANCZOS[i] / (z + i)
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma_log(s: complex) -> LogComplex:
    """Gamma(s) as a LogComplex; at s = -k the residue (-1)^k/k! with order 1."""
    k = _nonpositive_integer(complex(s))
    if k is not None:
        return LogComplex(-math.lgamma(k + 1), math.pi if k % 2 else 0.0, 1)
    return LogComplex.from_log(log_gamma(s))


def gamma_C(s: complex) -> LogComplex:
    """(2 pi)^(-s) Gamma(s)."""
    s = complex(s)
    return LogComplex.from_log(-s * math.log(TWO_PI)) * gamma_log(s)


def gamma_R(s: complex) -> LogComplex:
    """2^(-1/2) pi^(-s/2) Gamma(s/2); normalized so Gamma_R(s) Gamma_R(s+1) = Gamma_C(s)."""
    s = complex(s)
    pre = LogComplex.from_log(-0.5 * math.log(2) - 0.5 * s * math.log(math.pi))
    g = gamma_log(s / 2)
    if g.order:
        # leading coefficient in eps = s - s0 is twice the one in s/2
        g = LogComplex(g.log_abs + math.log(2), g.phase, g.order)
    return pre * g


def local_factor(datum: HodgeDatum, m: int, s: complex) -> LogComplex:
    require_valid(datum)
    if not 0 <= m <= 2 * datum.n:
        raise ValueError(f"degree m={m} outside [0, {2 * datum.n}]")
    out = LogComplex.one()
    if datum.field == "C":
        for p, q in datum.pairs(m):
            out = out * gamma_C(s - min(p, q)) ** datum.h[p][q]
        return out
    for p, q in datum.pairs(m):
        if p < q:
            out = out * gamma_C(s - p) ** datum.h[p][q]
    if m % 2 == 0 and datum.hpq(m // 2, m // 2):
        p = m // 2
        if datum.h_plus_minus is None:
            raise ValueError(f"real structure needs h^(p+), h^(p-) for p={p}")
        hp, hm = datum.h_plus_minus[p]
        out = out * gamma_R(s - p) ** hp * gamma_R(s - p + 1) ** hm
    return out


def alternating_product(datum: HodgeDatum, s: complex) -> LogComplex:
    """prod_m L(H^m, s)^((-1)^(m+n))."""
    out = LogComplex.one()
    for m in range(2 * datum.n + 1):
        sign = -1 if (m + datum.n) % 2 else 1
        out = out * local_factor(datum, m, s) ** sign
    return out
