import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from arinfinity import birkhoff as bk
from arinfinity import hodge
from arinfinity.birkhoff import NilpotentOp
from arinfinity.lattice import Window
from arinfinity.operators import monodromy_N
from arinfinity.tcomplex import build_truncation

J2, J3 = NilpotentOp.jordan(2), NilpotentOp.jordan(3)


def small_space(name="elliptic_curve", window=Window(-3, 3, 6)):
    return build_truncation(hodge.shipped(name), window)


def test_nilpotency_and_exp_against_scipy():
    assert (J2.nu, J3.nu, NilpotentOp.jordan(5).nu) == (2, 3, 5)
    for c in (1.0, -2.5j, 0.3 + 0.7j):
        assert np.allclose(J3.exp(c), scipy.linalg.expm(c * J3.matrix), atol=1e-14)
    with pytest.raises(ValueError):
        NilpotentOp(np.array([[1.0, 0], [0, 0]]))


def test_phi_minus_examples():
    assert np.allclose(bk.phi_minus(J2, 2), [[1, -0.5], [0, 1]])
    assert np.array_equal(bk.phi_minus(J2, math.inf), np.eye(2))
    zero = NilpotentOp(np.zeros((2, 2)))
    assert np.array_equal(bk.phi_minus(zero, 0.7), np.eye(2))
    with pytest.raises(ValueError):
        bk.phi_minus(J2, 0)


def test_phi_plus_limit_and_trivial_mu():
    # at z -> 0 the exponent tends to log(mu), so phi_plus(0) = exp(log(mu) N)
    assert np.allclose(bk.phi_plus(J3, 2.0, 0), J3.exp(math.log(2.0)), atol=1e-15)
    assert np.allclose(bk.phi_plus(J3, 2.0, 1e-7), J3.exp(math.log(2.0)), atol=1e-6)
    assert np.array_equal(bk.phi_plus(J3, 1.0, 0.4), np.eye(3))
    assert bk.branch_flag(-1.0) and not bk.branch_flag(2.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.05, 0.9), st.floats(-math.pi, math.pi))
def test_loop_factorization(mu, radius, angle):
    z = radius * complex(math.cos(angle), math.sin(angle))
    assert bk.loop_factorization_residual(NilpotentOp.jordan(4), mu, z) <= 1e-10


def test_dk_oracle_quadrature():
    r1 = bk.dk_oracle(J2, 1)
    assert r1["method"] == "quad" and r1["scalar"] == pytest.approx(1.0, abs=1e-12)
    assert bk.dk_oracle(J2, 2)["abs_error"] == 0.0  # N^2 = 0
    r = bk.dk_oracle(J3, 2)
    assert r["abs_error"] <= 1e-6
    assert np.allclose(r["closed_form"], J3.power(2) / 2)


def test_dk_oracle_montecarlo_seeded():
    a = bk.dk_oracle(NilpotentOp.jordan(5), 4, samples=200_000, seed=7)
    b = bk.dk_oracle(NilpotentOp.jordan(5), 4, samples=200_000, seed=7)
    assert a["scalar"] == b["scalar"]
    assert a["method"] == "montecarlo"
    # three standard errors of a Bernoulli(1/24) estimate
    assert abs(a["scalar"] - 1 / 24) <= 3 * a["scalar_error_estimate"]


def test_laurent_contour():
    coeffs = bk.laurent_coefficients(NilpotentOp.jordan(5), 4)
    for k, c in enumerate(coeffs):
        assert np.abs(c - NilpotentOp.jordan(5).power(k) / math.factorial(k)).max() <= 1e-12


def test_scaling_consistency_examples():
    assert bk.scaling_consistency(J3, 1.0, 2.0, 0.3)["residual"] == 0.0
    assert bk.scaling_consistency(J3, math.e, 2.0, 0.3)["residual"] <= 1e-10
    # mu = 1: only the theta action on the negative factor is left
    assert bk.scaling_consistency(J3, 2.0, 1.0, 0.3)["residual"] <= 1e-12


def test_theta_abstract_rejects_non_polynomial():
    with pytest.raises(ValueError):
        bk.theta(J3, 0.5, np.eye(3)[::-1])


def test_renorm_group_examples():
    trivial = bk.renorm_group(J2, 1.0, [1e-1, 1e-2])
    assert all(d <= 1e-15 for d in trivial["distances"])
    rep = bk.renorm_group(J2, math.e, [10.0 ** -k for k in range(1, 7)])
    d = rep["distances"]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[-1] <= 1e-5
    with pytest.raises(ValueError):
        bk.renorm_group(J2, 2.0, [1e-2, 1e-1])


def test_renorm_group_float_path_agrees_when_stable():
    eps = 1e-2
    rep = bk.renorm_group(J2, 3.0, [eps])
    assert np.allclose(rep["terms"][0], bk.renorm_group_matrix(J2, 3.0, eps), atol=1e-10)


@pytest.mark.parametrize("mu", [1.0, 2.0, math.e, 10.0])
def test_connection_residue(mu):
    rep = bk.connection_residue(NilpotentOp.jordan(4), mu)
    assert rep["error"] <= 1e-8 and rep["radius_agreement"] <= 1e-9
    with pytest.raises(ValueError):
        bk.connection_residue(J2, mu, radius=1.5)


def test_gauge_residue_is_minus_log_monodromy():
    rep = bk.gauge_residue(J3, 2.0)
    assert rep["error"] <= 1e-8
    assert np.allclose(rep["expected"], 2j * math.pi * J3.matrix)


@pytest.mark.parametrize("size", range(1, 6))
def test_log_recovery_float_and_exact(size):
    N = NilpotentOp.jordan(size)
    assert np.abs(bk.log_recovery(bk.monodromy_rep(N)) + N.matrix).max() <= 1e-12
    ex = bk.log_recovery_exact(np.eye(size, k=1, dtype=int).tolist())
    assert ex["exact"]


def test_log_recovery_exact_operator_on_window():
    space = small_space("k3", Window(-4, 4, 8))
    rep = bk.log_recovery_exact_operator(monodromy_N(space))
    assert rep["exact"] and rep["checked"] > 0 and rep["nilpotency"] >= 3


def test_truncated_log_exp_is_identity_series():
    coeffs = bk._truncated_log_exp(8)
    assert coeffs[1] == 1 and all(c == 0 for i, c in enumerate(coeffs) if i != 1)


def test_res_phi_exact():
    import sympy as sp

    out = bk.res_phi_exact([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert out == sp.Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])


def test_beta_from_residue_and_sl2_lift():
    space = small_space()
    assert bk.beta_from_residue(space)["equal"]
    lift = bk.sl2_lift(space, 2.0, 0.5)
    assert max(lift["loop_error"], lift["minus_error"], lift["rho_error"]) <= 1e-12
    assert lift["checked_columns"] > 0


def test_attached_mode_theta_is_conjugation():
    space = small_space()
    N = NilpotentOp.from_space(space)
    assert N.attached and N.is_sparse
    # theta_s(N) = e^{s} N since Phi has eigenvalue -r and N raises r by one
    out = bk.theta(N, 0.7, N.matrix)
    assert bk._max_abs(out - math.exp(0.7) * N.matrix, N.interior) <= 1e-12


def test_attached_mode_checks():
    space = small_space()
    N = NilpotentOp.from_space(space)
    assert bk.scaling_consistency(N, math.e, 2.0, 0.3)["residual"] <= 1e-10
    assert bk.connection_residue(N, 2.0)["error"] <= 1e-8
    rg = bk.renorm_group(N, math.e, [1e-3, 1e-4, 1e-5, 1e-6])
    assert rg["final_distance"] <= 1e-5
