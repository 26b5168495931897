import numpy as np
import pytest

from esmhd.numerics import build_ops, legendre_orthonormal, log_mean, minmod, modal_to_nodal, nodal_to_modal


@pytest.mark.parametrize("N", range(1, 9))
def test_sbp_property(N):
    ops = build_ops(N)
    assert np.max(np.abs(ops.Q + ops.Q.T - ops.B)) < 1e-13
    np.testing.assert_allclose(ops.Q.sum(axis=1), 0.0, atol=1e-13)
    np.testing.assert_allclose(ops.Q.sum(axis=0), np.diag(ops.B), atol=1e-13)
    assert ops.weights.sum() == pytest.approx(2.0, abs=1e-14)
    np.testing.assert_allclose(ops.nodes, -ops.nodes[::-1], atol=1e-15)


def test_n1_operators():
    ops = build_ops(1)
    np.testing.assert_allclose(ops.nodes, [-1, 1])
    np.testing.assert_allclose(ops.weights, [1, 1])
    np.testing.assert_allclose(ops.Q, [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15)
    np.testing.assert_allclose(ops.Q + ops.Q.T, np.diag([-1.0, 1.0]), atol=1e-15)


def test_n2_nodes_weights():
    ops = build_ops(2)
    np.testing.assert_allclose(ops.nodes, [-1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(ops.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)


def test_derivative_exact_on_quadratic():
    ops = build_ops(3)
    np.testing.assert_allclose(ops.D @ ops.nodes**2, 2 * ops.nodes, atol=1e-13)


@pytest.mark.parametrize("N", [4, 7, 12])
def test_quadrature_exactness(N):
    # LGL quadrature is exact up to degree 2N - 1
    ops = build_ops(N)
    k = 2 * N - 2
    assert np.dot(ops.weights, ops.nodes**k) == pytest.approx(2.0 / (k + 1), rel=1e-13)


def test_build_ops_rejects_bad_degree():
    with pytest.raises(ValueError):
        build_ops(0)


def test_log_mean_values():
    assert log_mean(2.0, 2.0) == 2.0
    assert log_mean(1.0, np.e) == pytest.approx(np.e - 1.0, rel=1e-15)
    val = log_mean(1.0, 1.0 + 1e-12)
    assert np.isfinite(val)
    assert abs(val - 1.0) < 1e-12


def test_log_mean_branch_continuity():
    # the series and direct branches agree where they meet
    a = 1.0
    zeta = np.sqrt(1e-4)
    b = (1 + zeta) / (1 - zeta)
    lo, hi = log_mean(a, b * (1 - 1e-9)), log_mean(a, b * (1 + 1e-9))
    assert abs(hi - lo) / lo < 1e-8
    ref = (b - a) / np.log(b / a)
    assert log_mean(a, b * (1 - 1e-12)) == pytest.approx(ref, rel=1e-13)


def test_log_mean_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_mean(0.0, 1.0)


@pytest.mark.parametrize("a,b,expected", [(1, 2, 1), (-1, 2, 0), (-3, -2, -2), (0, 5, 0)])
def test_minmod(a, b, expected):
    assert minmod(a, b) == expected


def test_modal_constant_and_top_mode():
    ops = build_ops(5)
    m = nodal_to_modal(np.full(6, 3.0), ops)
    assert m[0] == pytest.approx(3.0 / legendre_orthonormal(0, 0.0), rel=1e-13)
    np.testing.assert_allclose(m[1:], 0.0, atol=1e-13)
    top = nodal_to_modal(legendre_orthonormal(5, ops.nodes), ops)
    np.testing.assert_allclose(top, np.eye(6)[5], atol=1e-12)


def test_modal_round_trip(rng):
    ops = build_ops(6)
    f = rng.standard_normal((3, 7))
    np.testing.assert_allclose(modal_to_nodal(nodal_to_modal(f, ops), ops), f, atol=1e-12)
