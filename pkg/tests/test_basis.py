"""Clamped basis construction, evaluation, derivatives, and Gram blocks."""
import numpy as np
import pytest

from sflr.basis import (eval_basis, eval_basis_many, gram_block, make_basis)


@pytest.fixture(scope="module")
def cubic():
    return make_basis(1.0, 3, 30)


def test_counting_examples():
    assert make_basis(1.0, 3, 30).basis_count == 33
    assert make_basis(1.0, 4, 70).basis_count == 74
    assert make_basis(1.0, 3, 2).basis_count == 5


def test_interior_knots_equally_spaced(cubic):
    interior = cubic.knot_vector[cubic.degree:-cubic.degree]
    np.testing.assert_allclose(interior, np.arange(31) / 30.0, atol=1e-15)


def test_clamped_end_multiplicity(cubic):
    k = cubic.knot_vector
    assert np.sum(k == 0.0) == cubic.degree + 1
    assert np.sum(k == 1.0) == cubic.degree + 1
    assert np.all(np.diff(k) >= 0)


@pytest.mark.parametrize("bad", [
    dict(domain_end=0.0, degree=3, interval_count=10),
    dict(domain_end=-1.0, degree=3, interval_count=10),
    dict(domain_end=1.0, degree=0, interval_count=10),
    dict(domain_end=1.0, degree=3, interval_count=0),
])
def test_make_basis_rejects_bad_arguments(bad):
    with pytest.raises(ValueError):
        make_basis(**bad)


def test_partition_of_unity(cubic):
    rng = np.random.default_rng(11)
    pts = np.concatenate([np.linspace(0.0, 1.0, 1000),
                          rng.uniform(0.0, 1.0, 1000)])
    E = eval_basis_many(cubic, pts)
    assert np.max(np.abs(E.sum(axis=1) - 1.0)) < 1e-12


def test_endpoint_interpolation(cubic):
    left = eval_basis(cubic, 0.0)
    assert left[0] == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(left[1:])) < 1e-14
    right = eval_basis(cubic, 1.0)
    assert right[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(right[:-1])) < 1e-12


def test_compact_support(cubic):
    # each function lives on at most degree+1 consecutive subintervals
    mids = (cubic.breakpoints[:-1] + cubic.breakpoints[1:]) / 2.0
    E = eval_basis_many(cubic, mids)
    for l in range(cubic.basis_count):
        nz = np.flatnonzero(np.abs(E[:, l]) > 1e-14)
        assert nz.size <= cubic.degree + 1
        assert set(nz) <= set(cubic.support_intervals(l))


def test_derivative_matches_finite_difference(cubic):
    rng = np.random.default_rng(3)
    b = rng.standard_normal(cubic.basis_count)
    # stay away from knots where the 3rd derivative jumps
    pts = cubic.breakpoints[:-1] + 0.41 * np.diff(cubic.breakpoints)
    h = 1e-6
    for order in (1, 2):
        lo = eval_basis_many(cubic, pts - h, order - 1) @ b
        hi = eval_basis_many(cubic, pts + h, order - 1) @ b
        fd = (hi - lo) / (2.0 * h)
        an = eval_basis_many(cubic, pts, order) @ b
        assert np.max(np.abs(an - fd)) / max(1.0, np.max(np.abs(an))) < 1e-6


def test_eval_domain_and_order_validation(cubic):
    with pytest.raises(ValueError):
        eval_basis(cubic, -0.01)
    with pytest.raises(ValueError):
        eval_basis(cubic, 1.01)
    with pytest.raises(ValueError):
        eval_basis(cubic, 0.5, derivative_order=4)
    with pytest.raises(ValueError):
        eval_basis(cubic, 0.5, derivative_order=-1)


def _trapezoid_gram(basis, deriv, n_points=100_001):
    ts = np.linspace(0.0, basis.domain_end, n_points)
    E = eval_basis_many(basis, ts, deriv)
    w = np.full(n_points, ts[1] - ts[0])
    w[0] = w[-1] = 0.5 * (ts[1] - ts[0])
    return (E * w[:, None]).T @ E


def test_gram_block_sum_matches_trapezoid_oracle(cubic):
    total = sum(gram_block(cubic, j, 0)
                for j in range(1, cubic.interior_interval_count + 1))
    # the trapezoid oracle itself carries O(h^2) error, so refine enough
    # for its own bias to drop below the tolerance
    ref = _trapezoid_gram(cubic, 0, n_points=400_001)
    assert np.max(np.abs(total - ref)) / np.max(np.abs(ref)) < 1e-8


def test_gram_block_derivative_sum_matches_trapezoid_oracle(cubic):
    total = sum(gram_block(cubic, j, 2)
                for j in range(1, cubic.interior_interval_count + 1))
    ref = _trapezoid_gram(cubic, 2)
    assert np.max(np.abs(total - ref)) / np.max(np.abs(ref)) < 1e-6


@pytest.mark.parametrize("m", [0, 1, 2])
def test_gram_blocks_symmetric_psd(cubic, m):
    for j in (1, 7, 30):
        W = gram_block(cubic, j, m)
        assert np.allclose(W, W.T)
        assert np.linalg.eigvalsh(W).min() >= -1e-10


def test_gram_block_sparsity_pattern(cubic):
    d = cubic.degree
    for j in (1, 15, 30):
        W = gram_block(cubic, j, 0)
        nz = np.argwhere(np.abs(W) > 1e-15)
        assert nz.shape[0] <= (d + 1) ** 2
        # nonzero only for functions overlapping subinterval j
        lo, hi = j - 1, j - 1 + d
        assert nz.min() >= lo and nz.max() <= hi


def test_constant_annihilated_by_derivative_gram(cubic):
    ones = np.ones(cubic.basis_count)
    V2 = sum(gram_block(cubic, j, 2)
             for j in range(1, cubic.interior_interval_count + 1))
    assert abs(ones @ V2 @ ones) < 1e-10


def test_polynomials_below_m_annihilated(cubic):
    # least-squares projection finds the exact spline representation; the
    # quadratic form is compared against its roundoff scale because V has
    # entries of order M^3
    ts = np.linspace(0.0, 1.0, 2001)
    E = eval_basis_many(cubic, ts)
    V = sum(gram_block(cubic, j, 2)
            for j in range(1, cubic.interior_interval_count + 1))
    for target in (np.ones_like(ts), ts):
        b = np.linalg.lstsq(E, target, rcond=None)[0]
        scale = np.abs(b) @ np.abs(V) @ np.abs(b)
        assert abs(b @ V @ b) < 1e-12 * scale


def test_gram_block_index_validation(cubic):
    with pytest.raises(ValueError):
        gram_block(cubic, 0, 0)
    with pytest.raises(ValueError):
        gram_block(cubic, 31, 0)
    with pytest.raises(ValueError):
        gram_block(cubic, 1, 3)
