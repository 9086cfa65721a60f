"""Loops exp(f(z) N) for nilpotent N: Birkhoff factors, iterated integrals,
the renormalization group and the Fuchsian connection with residue N.

Matrices are numpy arrays, or scipy.sparse matrices for operators taken
from a window (these are shift operators with few entries per column).
A :class:`NilpotentOp` may carry a diagonal
Frobenius ``phi`` (attached mode, built from a window); without it the
time evolution acts by theta_s(N^k) = e^{ks} N^k on polynomials in N.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .operators import frobenius_Phi, monodromy_N
from .tcomplex import GradedSpace


@dataclass
class NilpotentOp:
    matrix: np.ndarray
    phi: np.ndarray | None = None  # diagonal of Frobenius, attached mode only
    interior: list | None = None  # columns trusted on a truncation
    nu: int = field(init=False)

    def __post_init__(self):
        if sparse.issparse(self.matrix):
            a = sparse.csr_matrix(self.matrix, dtype=complex)
        else:
            a = np.asarray(self.matrix, dtype=complex)
            if a.ndim != 2:
                raise ValueError("N must be a square matrix")
        if a.shape[0] != a.shape[1]:
            raise ValueError("N must be a square matrix")
        self.matrix = a
        self._powers = [self.identity()]
        for nu in range(a.shape[0] + 1):
            if not _nonzero(self._powers[-1]):
                self.nu = nu
                self._powers.pop()
                break
            self._powers.append(self._powers[-1] @ a)
        else:
            raise ValueError("matrix is not nilpotent")

    @classmethod
    def jordan(cls, size: int) -> "NilpotentOp":
        return cls(np.eye(size, k=1))

    @classmethod
    def from_space(cls, space: GradedSpace) -> "NilpotentOp":
        N = monodromy_N(space)
        Phi = frobenius_Phi(space)
        diag = np.array([float(Phi.column(i).get(i, 0)) for i in range(space.dim)])
        rows, cols, vals = [], [], []
        for c, col in N.cols.items():
            for r, v in col.items():
                rows.append(r)
                cols.append(c)
                vals.append(complex(v))
        mat = sparse.csr_matrix((vals, (rows, cols)), shape=(space.dim, space.dim), dtype=complex)
        return cls(mat, diag, sorted(N.interior))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def attached(self) -> bool:
        return self.phi is not None

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.matrix)

    def identity(self):
        n = self.matrix.shape[0]
        return sparse.identity(n, dtype=complex, format="csr") if sparse.issparse(self.matrix) else np.eye(n, dtype=complex)

    def zeros(self):
        n = self.matrix.shape[0]
        return sparse.csr_matrix((n, n), dtype=complex) if sparse.issparse(self.matrix) else np.zeros((n, n), dtype=complex)

    def power(self, k: int):
        if k < len(self._powers):
            return self._powers[k]
        return self.zeros()

    def exp(self, coeff: complex):
        """exp(coeff * N) as a finite sum."""
        out = self.identity()
        c = 1
        for k in range(1, self.nu):
            c = c * coeff / k
            out = out + c * self._powers[k]
        return out


def _nonzero(a) -> bool:
    if sparse.issparse(a):
        return a.count_nonzero() > 0
    return bool(np.any(a))


def _dense(a) -> np.ndarray:
    return a.toarray() if sparse.issparse(a) else np.asarray(a)


def _max_abs(a, cols=None) -> float:
    if sparse.issparse(a):
        a = a.tocsc()
        if cols is not None:
            a = a[:, cols]
        return float(abs(a).max()) if a.nnz else 0.0
    a = np.asarray(a)
    if cols is not None:
        a = a[:, cols]
    return float(np.max(np.abs(a))) if a.size else 0.0


# ---------------------------------------------------------------- Birkhoff factors


def phi_minus(N: NilpotentOp, z: complex) -> np.ndarray:
    """exp(-N/z); identity at z = infinity."""
    if z == math.inf:
        return N.identity()
    if z == 0:
        raise ValueError("the negative factor is not defined at z = 0")
    return N.exp(-1 / complex(z))


def _mu_power(mu: complex, z: complex) -> complex:
    return cmath.exp(z * cmath.log(mu))


def branch_flag(mu: complex) -> bool:
    """True when mu sits on the cut of the principal logarithm."""
    mu = complex(mu)
    if mu == 0:
        raise ValueError("mu must be nonzero")
    return mu.imag == 0 and mu.real < 0


def plus_exponent(mu: complex, z: complex) -> complex:
    """(mu^z - 1)/z, with the limit log(mu) at z = 0."""
    lm = cmath.log(complex(mu))
    w = complex(z) * lm
    if abs(w) < 1e-5:
        # series of (e^w - 1)/w
        return lm * (1 + w / 2 + w * w / 6 + w ** 3 / 24)
    return (cmath.exp(w) - 1) / complex(z)


def phi_plus(N: NilpotentOp, mu: complex, z: complex) -> np.ndarray:
    return N.exp(plus_exponent(mu, z))


def loop_phi(N: NilpotentOp, mu: complex, z: complex) -> np.ndarray:
    """exp(mu^z N / z)."""
    if z == 0:
        raise ValueError("the loop has a pole at z = 0")
    return N.exp(_mu_power(mu, z) / complex(z))


def loop_factorization_residual(N: NilpotentOp, mu: complex, z: complex) -> float:
    """|loop - phi_minus^{-1} phi_plus|, with the inverse taken numerically."""
    if N.is_sparse:
        inv = N.exp(1 / complex(z))
        if _max_abs(inv @ phi_minus(N, z) - N.identity()) > 1e-12:
            raise ArithmeticError("inverse of the negative factor is inaccurate")
        prod = inv @ phi_plus(N, mu, z)
    else:
        prod = np.linalg.solve(phi_minus(N, z), phi_plus(N, mu, z))
    return _max_abs(loop_phi(N, mu, z) - prod)


# ---------------------------------------------------------------- iterated integrals


def _simplex_integral_quad(k: int) -> tuple[float, float]:
    """int_{s1 >= ... >= sk >= 0} e^{-(s1+...+sk)} by nested quadrature."""
    from scipy import integrate

    if k == 1:
        val, err = integrate.quad(lambda s: math.exp(-s), 0, math.inf, epsabs=1e-13, epsrel=1e-13)
        return val, err

    # innermost variable first: s_k in [0, s_{k-1}], ..., s_1 in [0, inf)
    def integrand(*s):
        return math.exp(-sum(s))

    ranges = []
    for level in range(k - 1):
        ranges.append(lambda *outer: (0.0, outer[0]))
    ranges.append((0.0, math.inf))
    val, err = integrate.nquad(integrand, ranges, opts={"epsabs": 1e-12, "epsrel": 1e-12})
    return val, err


def _simplex_integral_mc(k: int, samples: int, seed: int) -> tuple[float, float]:
    """Same integral as P(s1 >= ... >= sk) for iid Exp(1) variables."""
    rng = np.random.default_rng(seed)
    hits, done = 0, 0
    chunk = 1_000_000
    while done < samples:
        n = min(chunk, samples - done)
        x = rng.exponential(size=(n, k))
        hits += int(np.count_nonzero(np.all(np.diff(x, axis=1) <= 0, axis=1)))
        done += n
    p = hits / samples
    return p, math.sqrt(p * (1 - p) / samples)


def dk_oracle(N: NilpotentOp, k: int, method: str = "auto", samples: int = 4_000_000, seed: int = 20240607):
    """d_k from the iterated integral, against the closed form N^k/k!.

    With beta = N and theta_{-s}(N) = e^{-s} N the integrand is
    N^k e^{-(s1+...+sk)} over the ordered simplex, so only a scalar
    integral is computed numerically.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if method == "auto":
        method = "quad" if k <= 3 else "montecarlo"
    if method == "quad":
        scalar, err = _simplex_integral_quad(k)
    elif method == "montecarlo":
        scalar, err = _simplex_integral_mc(k, samples, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    Nk = N.power(k)
    exact = 1 / math.factorial(k)
    return {
        "k": k,
        "method": method,
        "scalar": scalar,
        "scalar_error_estimate": err,
        "matrix": scalar * Nk,
        "closed_form": exact * Nk,
        "rel_error": abs(scalar - exact) / exact,
        "abs_error": _max_abs(scalar * Nk - exact * Nk, N.interior),
    }


def laurent_coefficients(N: NilpotentOp, kmax: int, radius: float = 1.0, points: int = 64) -> list[np.ndarray]:
    """Coefficients of z^{-k} in exp(N/z) by the trapezoid rule on |z| = radius."""
    zs = radius * np.exp(2j * np.pi * np.arange(points) / points)
    values = [N.exp(1 / z) for z in zs]
    out = []
    for k in range(kmax + 1):
        acc = N.zeros()
        for v, z in zip(values, zs):
            acc = acc + v * z ** k
        out.append(acc / points)
    return out


# ---------------------------------------------------------------- time evolution


def theta(N: NilpotentOp, s: float, X: np.ndarray) -> np.ndarray:
    """theta_s on the algebra generated by N."""
    if s == 0:
        return X
    if N.attached:
        # e^{-s Phi} X e^{s Phi} with Phi = diag(phi)
        left = sparse.diags(np.exp(-s * N.phi))
        right = sparse.diags(np.exp(s * N.phi))
        out = left @ X @ right
        return sparse.csr_matrix(out) if sparse.issparse(X) else np.asarray(out)
    powers = [N.power(k).ravel() for k in range(N.nu)]
    basis = np.stack(powers, axis=1)
    coeffs, *_ = np.linalg.lstsq(basis, np.asarray(X, dtype=complex).ravel(), rcond=None)
    if _max_abs(basis @ coeffs - np.asarray(X).ravel()) > 1e-9 * max(1.0, _max_abs(X)):
        raise ValueError("theta only acts on polynomials in N")
    return sum(c * math.exp(k * s) * N.power(k) for k, c in enumerate(coeffs))


def scaling_consistency(N: NilpotentOp, lam: float, mu: complex, eps: float) -> dict:
    """Residuals of phi_{lam mu} = theta_{t eps} phi_mu and the phi_plus evolution law."""
    t = math.log(lam)
    cols = N.interior
    loop_lhs = loop_phi(N, lam * mu, eps)
    loop_rhs = theta(N, t * eps, loop_phi(N, mu, eps))
    plus_lhs = phi_plus(N, lam * mu, eps)
    plus_rhs = N.exp(plus_exponent(lam, eps)) @ theta(N, t * eps, phi_plus(N, mu, eps))
    r1 = _max_abs(loop_lhs - loop_rhs, cols) / max(1.0, _max_abs(loop_lhs, cols))
    r2 = _max_abs(plus_lhs - plus_rhs, cols) / max(1.0, _max_abs(plus_lhs, cols))
    return {"lambda": lam, "mu": mu, "eps": eps, "loop_residual": r1, "plus_residual": r2,
            "residual": max(r1, r2)}


def _rg_coefficients(nu: int, t: float, eps: float, digits: int | None = None) -> list[complex]:
    """Coefficients c_k of phi_minus(eps) theta_{t eps}(phi_minus(eps)^{-1}) = sum c_k N^k.

    Both factors are polynomials in N and theta_s multiplies N^k by e^{ks},
    so the product is formed on coefficient sequences.  The individual
    coefficients are of size eps^{-k}, so the working precision grows with
    (nu - 1) * log10(1/eps) to keep the cancellation harmless.
    """
    import mpmath

    if digits is None:
        digits = 30 + math.ceil((nu - 1) * max(0.0, -math.log10(eps)))

    with mpmath.workdps(digits):
        e = mpmath.mpf(eps)
        a = [(-1 / e) ** k / mpmath.factorial(k) for k in range(nu)]  # exp(-N/eps)
        b = [(1 / e) ** k / mpmath.factorial(k) * mpmath.exp(k * t * e) for k in range(nu)]
        c = [mpmath.fsum(a[i] * b[k - i] for i in range(k + 1)) for k in range(nu)]
        return [complex(x) for x in c]


def renorm_group(N: NilpotentOp, lam: float, eps_sequence) -> dict:
    """phi_minus(eps) theta_{t eps}(phi_minus(eps)^{-1}) as eps -> 0."""
    t = math.log(lam)
    eps_sequence = list(eps_sequence)
    if any(b >= a for a, b in zip(eps_sequence, eps_sequence[1:])):
        raise ValueError("eps sequence must decrease")
    target = N.exp(t)
    powers = [N.power(k) for k in range(N.nu)]
    terms = []
    for eps in eps_sequence:
        coeffs = _rg_coefficients(N.nu, t, eps)
        acc = N.zeros()
        for c, P in zip(coeffs, powers):
            acc = acc + c * P
        terms.append(acc)
    distances = [_max_abs(x - target, N.interior) for x in terms]
    cauchy = [_max_abs(b - a, N.interior) for a, b in zip(terms, terms[1:])]
    limit = None
    if len(terms) >= 2:
        # first-order Richardson extrapolation on the last two terms
        e1, e2 = eps_sequence[-2], eps_sequence[-1]
        limit = (e1 * terms[-1] - e2 * terms[-2]) / (e1 - e2)
    return {
        "lambda": lam,
        "eps": eps_sequence,
        "terms": terms,
        "distances": distances,
        "cauchy": cauchy,
        "final_distance": distances[-1] if distances else None,
        "limit": limit,
        "limit_distance": None if limit is None else _max_abs(limit - target, N.interior),
        "target": target,
    }


def renorm_group_matrix(N: NilpotentOp, lam: float, eps: float) -> np.ndarray:
    """The same product in plain float matrices; only usable while eps^{1-nu} stays small."""
    pm = _dense(phi_minus(N, eps))
    return pm @ _dense(theta(N, math.log(lam) * eps, np.linalg.inv(pm)))


# ---------------------------------------------------------------- connection and monodromy


def connection_coefficient(N: NilpotentOp, mu: complex, z: complex) -> np.ndarray:
    """A(z) with nabla = A(z) dz: N (1/z + d/dz (mu^z - 1)/z)."""
    lm = cmath.log(complex(mu))
    w = z * lm
    if abs(w) < 1e-4:
        dg = lm * lm * (0.5 + w / 3 + w * w / 8)
    else:
        dg = (w * cmath.exp(w) - (cmath.exp(w) - 1)) / (z * z)
    return N.matrix * (1 / z + dg)


def contour_residue(fn, radius: float, points: int) -> np.ndarray:
    """(1/2 pi i) of the integral of fn(z) dz over |z| = radius, by the trapezoid rule."""
    zs = radius * np.exp(2j * np.pi * np.arange(points) / points)
    acc = None
    for z in zs:
        term = fn(z) * z
        acc = term if acc is None else acc + term
    return acc / points


def connection_residue(N: NilpotentOp, mu: complex, radius: float = 0.25, points: int = 2048,
                       second_radius: float | None = None) -> dict:
    if not 0 < radius < 1:
        raise ValueError("contour radius must be in (0, 1)")
    second_radius = radius / 2 if second_radius is None else second_radius
    r1 = contour_residue(lambda z: connection_coefficient(N, mu, z), radius, points)
    r2 = contour_residue(lambda z: connection_coefficient(N, mu, z), second_radius, points)
    return {
        "mu": mu,
        "branch_flag": branch_flag(mu),
        "residue": r1,
        "error": _max_abs(r1 - N.matrix, N.interior),
        "second_radius_error": _max_abs(r2 - N.matrix, N.interior),
        "radius_agreement": _max_abs(r1 - r2, N.interior),
    }


def monodromy_rep(N: NilpotentOp) -> np.ndarray:
    """pi(gamma) = exp(-2 pi i N)."""
    return N.exp(-2j * math.pi)


def log_unipotent(T: np.ndarray) -> np.ndarray:
    """log of a unipotent matrix through the finite series in T - 1."""
    if sparse.issparse(T):
        T = sparse.csr_matrix(T, dtype=complex)
        eye = sparse.identity(T.shape[0], dtype=complex, format="csr")
        out = sparse.csr_matrix(T.shape, dtype=complex)
    else:
        T = np.asarray(T, dtype=complex)
        eye = np.eye(T.shape[0], dtype=complex)
        out = np.zeros_like(T)
    X = T - eye
    term = eye
    for k in range(1, T.shape[0] + 1):
        term = term @ X
        if not _nonzero(term):
            break
        out = out + ((-1) ** (k + 1) / k) * term
    return out


def log_recovery(T0: np.ndarray) -> np.ndarray:
    """(1/2 pi i) log pi(gamma)."""
    return log_unipotent(T0) / (2j * math.pi)


def log_recovery_exact(N_entries) -> dict:
    """Symbolic round trip log(exp(-2 pi i N)) = -2 pi i N for a rational N."""
    import sympy as sp

    N = sp.Matrix(N_entries)
    size = N.shape[0]
    X = -2 * sp.pi * sp.I * N
    T = sp.eye(size)
    term = sp.eye(size)
    for k in range(1, size + 1):
        term = term * X / k
        T += term
    D = T - sp.eye(size)
    L = sp.zeros(size)
    power = sp.eye(size)
    for k in range(1, size + 1):
        power = power * D
        L += sp.Rational((-1) ** (k + 1), k) * power
    L = L.applyfunc(sp.expand)
    recovered = (L / (2 * sp.pi * sp.I)).applyfunc(sp.simplify)
    return {"log": L, "recovered": recovered, "exact": recovered == -N}


def _log_pi(N: NilpotentOp):
    cached = getattr(N, "_log_pi_cache", None)
    if cached is None:
        cached = log_unipotent(monodromy_rep(N))
        N._log_pi_cache = cached
    return cached


def gauge_potential(N: NilpotentOp, mu: complex, z: complex) -> np.ndarray:
    """-phi_plus^{-1} (log pi(gamma) / z) phi_plus + phi_plus^{-1} d phi_plus / dz."""
    P = phi_plus(N, mu, z)
    Pinv = N.exp(-plus_exponent(mu, z))
    logpi = _log_pi(N)
    lm = cmath.log(complex(mu))
    w = z * lm
    dg = lm * lm * (0.5 + w / 3) if abs(w) < 1e-4 else (w * cmath.exp(w) - (cmath.exp(w) - 1)) / (z * z)
    dP = dg * N.matrix @ P
    return -Pinv @ (logpi / z) @ P + Pinv @ dP


def gauge_residue(N: NilpotentOp, mu: complex, radius: float = 0.25, points: int = 2048) -> dict:
    res = contour_residue(lambda z: gauge_potential(N, mu, z), radius, points)
    expected = -_log_pi(N)
    return {"mu": mu, "residue": res, "expected": expected, "error": _max_abs(res - expected, N.interior)}


def res_phi_exact(N_entries):
    """d/dz exp(N z) at z = 0 from exact interpolation at z = 0, 1, ..., nu-1.

    exp(N z) is a matrix polynomial of degree < nu, so the differentiated
    Lagrange interpolant is exact.
    """
    import sympy as sp

    N = sp.Matrix(N_entries)
    size = N.shape[0]
    z = sp.Symbol("z")
    nodes = list(range(size + 1))
    values = []
    for x in nodes:
        E, term = sp.eye(size), sp.eye(size)
        for k in range(1, size + 1):
            term = term * N * x / k
            E += term
        values.append(E)
    out = sp.zeros(size)
    for i, xi in enumerate(nodes):
        basis = sp.Integer(1)
        for j, xj in enumerate(nodes):
            if j != i:
                basis *= (z - xj) / sp.Integer(xi - xj)
        out += values[i] * sp.diff(basis, z).subs(z, 0)
    return out


def beta_from_residue(space: GradedSpace):
    """Upsilon(Res phi) = [Res phi, Phi] on a window, with Res phi = N; compared with N."""
    N = monodromy_N(space)
    Phi = frobenius_Phi(space)
    beta = N @ Phi - Phi @ N
    worst, checked, _ = beta.compare(N)
    return {"equal": worst == 0, "checked": checked}


def sl2_lift(space: GradedSpace, mu: float, z: float) -> dict:
    """loop_phi and phi_minus^{-1} against sigma^R(u(.)) on window interiors."""
    from .operators import rep_sigma

    Nop = NilpotentOp.from_space(space)
    Nsp = monodromy_N(space)
    cols = sorted(Nsp.interior)
    u_loop = Nsp.exp_nilpotent(mu ** z / z)
    u_minus = Nsp.exp_nilpotent(1 / z)
    trusted_loop = sorted(set(cols) - u_loop.escaping)
    trusted_minus = sorted(set(cols) - u_minus.escaping)
    e_loop = _max_abs(_dense(loop_phi(Nop, mu, z)) - u_loop.to_dense(), trusted_loop)
    from scipy.sparse.linalg import spsolve

    pm = sparse.csc_matrix(phi_minus(Nop, z))
    pm_inv = spsolve(pm, sparse.identity(Nop.size, dtype=complex, format="csc"))
    e_minus = _max_abs(_dense(pm_inv) - u_minus.to_dense(), trusted_minus)
    # rho(e) = exp(N) = u(1)
    u_t = rep_sigma(space, "R", "u", 1)
    e_rho = _max_abs(_dense(Nop.exp(1.0)) - u_t.to_dense(), sorted(set(cols) - u_t.escaping))
    return {"loop_error": e_loop, "minus_error": e_minus, "rho_error": e_rho,
            "checked_columns": len(trusted_loop)}



def _truncated_log_exp(nu: int) -> list:
    """Rational coefficients a_k of log(exp(x)) modulo x^nu."""
    from fractions import Fraction

    def mul(a, b):
        out = [Fraction(0)] * nu
        for i, ai in enumerate(a):
            if ai:
                for j in range(nu - i):
                    out[i + j] += ai * b[j]
        return out

    y = [Fraction(0)] + [Fraction(1, math.factorial(k)) for k in range(1, nu)]
    out = [Fraction(0)] * nu
    power = [Fraction(1)] + [Fraction(0)] * (nu - 1)
    for j in range(1, nu):
        power = mul(power, y)
        out = [o + Fraction((-1) ** (j + 1), j) * p for o, p in zip(out, power)]
    return out


def log_recovery_exact_operator(op) -> dict:
    """Exact log(exp(cN)) = cN for a window operator N and any scalar c.

    The coefficient of N^k in log(exp(cN)) is a_k c^k with rational a_k, so
    the identity for c = -2 pi i is equivalent to the rational one at c = 1:
    sum_k a_k N^k = N, checked entrywise on the sparse operator.
    """
    powers = [op.power(0)]
    while powers[-1].cols:
        powers.append(op @ powers[-1])
    nu = len(powers) - 1
    coeffs = _truncated_log_exp(max(nu, 1))
    log_op = type(op)(op.space)
    for k, a in enumerate(coeffs):
        if a:
            log_op = log_op + powers[k].scale(a)
    worst, checked, _ = log_op.compare(op)
    return {"nilpotency": nu, "exact": worst == 0, "checked": checked,
            "nonlinear_coefficients": [str(a) for a in coeffs[2:] if a]}
