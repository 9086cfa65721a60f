"""Zeta-regularized determinants of Frobenius-type spectra.

A spectrum is a :class:`SpectralMeasure`: finitely many explicit eigenvalues
plus arithmetic progressions of step +-1.  Progressions are summed in closed
form through the Hurwitz zeta function, continued by Euler-Maclaurin.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .factors import TWO_PI, LogComplex, alternating_product, local_factor
from .hodge import HodgeDatum, require_valid
from .spectral import SpectralMeasure
from .tcomplex import ar_cohomology


class ZetaPole(ArithmeticError):
    """Evaluation at the pole z = 1 of the Hurwitz zeta function."""


class BranchError(ValueError):
    """Some s - lambda vanishes, so (s - lambda)^(-z) is undefined."""


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple[float, ...]:
    """B_2, B_4, ..., B_{2 count} via the Akiyama-Tanigawa recurrence."""
    top = 2 * count
    out = []
    a = [Fraction(0)] * (top + 1)
    for m in range(top + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(float(a[0]))
    return tuple(out)


_EM_TERMS = 14


def _terms_for(z: complex) -> int:
    """Correction terms: the remainder decays like x^(-Re z - 2T - 1), so T grows when Re z < 0."""
    return max(_EM_TERMS, math.ceil(-z.real / 2) + 10)


def _power(base: complex, z: complex) -> complex:
    """Principal-branch base**(-z)."""
    return cmath.exp(-z * cmath.log(base))


def _shift_for(a: complex, z: complex) -> int:
    """Direct-sum length that makes the Euler-Maclaurin remainder negligible."""
    base = max(0, math.ceil(-a.real) + 1)
    z = complex(z)
    if z.real >= 0:
        return max(base, math.ceil(12.0 + 0.5 * abs(z) - a.real))
    # For Re z < 0 the head terms grow like x^(-Re z), so a long head loses
    # digits to cancellation.  Balance that roundoff against the first
    # omitted correction term, B_{2T+2}/(2T+2)! (z)_{2T+1} x^(-z-2T-1).
    order = 2 * _terms_for(z) + 1
    log_rising = sum(math.log(max(abs(z + j), 1e-300)) for j in range(order))
    log_bernoulli = math.log(2.0) - (order + 1) * math.log(2 * math.pi)
    best_n, best = base, math.inf
    for n in range(base, base + 200):
        lx = math.log(abs(a + n))
        roundoff = -36.8 + (1 - z.real) * max(lx, 0.0)  # log(1e-16) + log|x^(1-z)|
        remainder = log_bernoulli + log_rising - (z.real + order) * lx
        estimate = max(roundoff, remainder)
        if estimate < best:
            best_n, best = n, estimate
    return best_n


def _check_a(a: complex) -> None:
    if a.imag == 0 and a.real <= 0 and a.real == math.floor(a.real):
        raise BranchError(f"Hurwitz parameter a={a.real:g} hits zero")


def hurwitz_zeta(z: complex, a: complex) -> complex:
    """sum_{k>=0} (a+k)^(-z), continued in z; principal branch for each term.

    Relative accuracy is about 1e-13 for -5 <= Re z <= 30, |Im z| <= 5 and
    1e-10 for 0 <= Re z <= 30, |Im z| <= 20 (Re a > 0, |a| <= 50).  Far to
    the left with large |Im z| the head terms dwarf the result and double
    precision runs out.
    """
    z, a = complex(z), complex(a)
    if z == 1:
        raise ZetaPole("Hurwitz zeta has a simple pole at z = 1")
    _check_a(a)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        # the expansion terminates, and a short head avoids cancellation
        n = 0
    else:
        n = _shift_for(a, z)
    head = sum(_power(a + k, z) for k in range(n))
    x = a + n
    tail = x ** (1 - z) / (z - 1) + 0.5 * _power(x, z)
    rising = z  # z (z+1) ... (z+2j-2)
    fact = 2.0  # (2j)!
    xpow = _power(x, z + 1)  # x^(-z-2j+1)
    for j, b in enumerate(_bernoulli_even(_terms_for(z)), start=1):
        tail += b / fact * rising * xpow
        rising *= (z + 2 * j - 1) * (z + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
        xpow /= x * x
    return head + tail


def hurwitz_zeta_at_0(a: complex) -> complex:
    _check_a(complex(a))
    return 0.5 - complex(a)


def hurwitz_zeta_dz_at_0(a: complex) -> complex:
    """d/dz zeta_H(z, a) at z = 0, from the term-wise derivative of the expansion."""
    a = complex(a)
    _check_a(a)
    n = _shift_for(a, 0)
    x = a + n
    lx = cmath.log(x)
    out = -sum(cmath.log(a + k) for k in range(n))
    out += x * (lx - 1) - 0.5 * lx
    xpow = 1 / x
    for j, b in enumerate(_bernoulli_even(_EM_TERMS), start=1):
        out += b / (2 * j * (2 * j - 1)) * xpow
        xpow /= x * x
    return out


# ---------------------------------------------------------------- spectra


def _as_complex(x) -> complex:
    return complex(float(x.real), float(x.imag)) if isinstance(x, complex) else complex(float(x))


def _tail_parameter(s: complex, start, step: int) -> complex:
    # step -1: s - (c - l) = (s - c) + l;  step +1: s - (c + l) = -((c - s) + l)
    return s - _as_complex(start) if step == -1 else _as_complex(start) - s


def zeta_two_var(measure: SpectralMeasure, observable: str, s: complex, z: complex) -> complex:
    """sum_lambda Tr(a Pi_lambda) (s - lambda)^(-z) on the principal branch.

    A step +1 progression is summed as e^(-i pi z) zeta_H(z, c - s), which is
    the principal branch when s is real or Im(s) > 0.
    """
    s, z = complex(s), complex(z)
    total = 0j
    for lam, entry in measure.head.items():
        w = entry.weight(observable)
        if w == 0:
            continue
        base = s - _as_complex(lam)
        if base == 0:
            raise BranchError(f"s coincides with eigenvalue {lam}")
        total += complex(w) * _power(base, z)
    for t in measure.tails:
        w = t.weight(observable)
        if w == 0:
            continue
        a = _tail_parameter(s, t.start, t.step)
        _check_a(a)
        term = hurwitz_zeta(z, a)
        if t.step == 1:
            term *= cmath.exp(-1j * math.pi * z)
        total += complex(w) * term
    return total


def zeta_two_var_derivative_at_0(measure: SpectralMeasure, observable: str, s: complex, scale: float = 1.0):
    """(zeta(s, 0), d/dz zeta(s, z) at 0) for the spectrum of (s - Phi)/scale."""
    s = complex(s)
    value, deriv = 0j, 0j
    for lam, entry in measure.head.items():
        w = entry.weight(observable)
        if w == 0:
            continue
        base = s - _as_complex(lam)
        if base == 0:
            raise BranchError(f"s coincides with eigenvalue {lam}")
        value += complex(w)
        deriv -= complex(w) * cmath.log(base)
    for t in measure.tails:
        w = t.weight(observable)
        if w == 0:
            continue
        a = _tail_parameter(s, t.start, t.step)
        z0 = hurwitz_zeta_at_0(a)
        d0 = hurwitz_zeta_dz_at_0(a)
        if t.step == 1:
            d0 -= 1j * math.pi * z0
        value += complex(w) * z0
        deriv += complex(w) * d0
    # zeta_scaled(z) = scale^z zeta(z)
    deriv += math.log(scale) * value
    return value, deriv


def regdet(measure: SpectralMeasure, observable: str, s: complex, scale: float = 1.0) -> LogComplex:
    """det_inf((s - Phi)/scale) = exp(-d/dz zeta at z = 0)."""
    _, deriv = zeta_two_var_derivative_at_0(measure, observable, s, scale)
    return LogComplex.from_log(-deriv)


# ---------------------------------------------------------------- comparisons


def _grid_report(name, points, lhs, rhs, tol):
    rows, skipped, worst = [], [], 0.0
    for s in points:
        try:
            a, b = lhs(s), rhs(s)
        except (BranchError, ValueError, ZetaPole) as exc:
            skipped.append({"s": _json_complex(s), "reason": str(exc)})
            continue
        if a.order or b.order:
            skipped.append({"s": _json_complex(s), "reason": "pole or zero on the factor side"})
            continue
        err = a.rel_diff(b)
        worst = max(worst, err)
        rows.append({"s": _json_complex(s), "regdet": a.as_dict(), "factor": b.as_dict(), "rel_error": err})
    return {
        "check": name,
        "points": rows,
        "skipped": skipped,
        "max_rel_error": worst,
        "tolerance": tol,
        "ok": bool(rows) and worst <= tol,
    }


def _json_complex(s):
    s = complex(s)
    return s.real if s.imag == 0 else [s.real, s.imag]


def check_deninger(datum: HodgeDatum, m: int, s_grid, tol: float = 1e-8) -> dict:
    """det_inf((s - Phi)/2pi | H^m)^(-1) against the Gamma-factor product."""
    require_valid(datum)
    if datum.field != "C":
        raise ValueError("the determinant comparison is only set up for complex data")
    measure = ar_cohomology(datum, m)

    def lhs(s):
        return LogComplex.one() / regdet(measure, "identity", s, TWO_PI)

    report = _grid_report(f"deninger m={m}", s_grid, lhs, lambda s: local_factor(datum, m, s), tol)
    report["m"] = m
    return report


def alternating_measure(datum: HodgeDatum) -> SpectralMeasure:
    out = SpectralMeasure()
    for m in range(2 * datum.n + 1):
        out = out.union(ar_cohomology(datum, m))
    return out


def check_alternating(datum: HodgeDatum, s_grid, tol: float = 1e-8) -> dict:
    """Determinant weighted by sigma^L(w)^2 against the alternating Gamma product."""
    require_valid(datum)
    if datum.field != "C":
        raise ValueError("the determinant comparison is only set up for complex data")
    measure = alternating_measure(datum)

    def lhs(s):
        return LogComplex.one() / regdet(measure, "sigmaL_w2", s, TWO_PI)

    return _grid_report("alternating", s_grid, lhs, lambda s: alternating_product(datum, s), tol)



def parse_grid(text: str) -> list[float]:
    """'a:b:step' (inclusive when b lands on the grid) or a comma list."""
    if ":" in text:
        a, b, step = (float(x) for x in text.split(":"))
        if step <= 0 or b < a:
            raise ValueError(f"bad grid {text!r}")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [a + i * step for i in range(count)]
    return [float(x) for x in text.split(",")]
