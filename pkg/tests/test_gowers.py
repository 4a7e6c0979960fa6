import numpy as np
import pytest

from gowerslab import gowers
from gowerslab.errors import BudgetExceeded, InputError, InvariantViolation
from gowerslab.gowers import BoxKernel, box_norm, cube_vertices, gowers_inner_product, u_norm, u_norm_full
from gowerslab.zmod import dft, polynomial_phase, spectral_norm

from helpers import random_fn

SLACK = 1e-9


def random_kernel(rng, shape):
    return BoxKernel(rng.normal(size=shape) + 1j * rng.normal(size=shape))


def test_cube_vertices_order():
    assert cube_vertices(2) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_box_inner_product_brute(rng):
    ks = [random_kernel(rng, (3, 4)) for _ in range(4)]
    brute = 0j
    for x0 in range(3):
        for x1 in range(3):
            for y0 in range(4):
                for y1 in range(4):
                    brute += (
                        ks[0].values[x0, y0]
                        * np.conj(ks[1].values[x0, y1])
                        * np.conj(ks[2].values[x1, y0])
                        * ks[3].values[x1, y1]
                    )
    brute /= (3 * 4) ** 2
    assert abs(gowers_inner_product(ks) - brute) < 1e-12
    mapping = dict(zip(cube_vertices(2), ks))
    assert abs(gowers_inner_product(mapping) - brute) < 1e-12


def test_box_norm_d1_is_abs_mean(rng):
    K = random_kernel(rng, (7,))
    assert box_norm(K) == pytest.approx(abs(np.mean(K.values)))


@pytest.mark.parametrize("d,shape", [(2, (5, 6)), (3, (3, 4, 3))])
def test_gowers_cauchy_schwarz(rng, d, shape):
    for _ in range(500):
        ks = [random_kernel(rng, shape) for _ in range(2**d)]
        lhs = abs(gowers_inner_product(ks))
        rhs = np.prod([box_norm(k) for k in ks])
        assert lhs <= rhs * (1 + SLACK) + SLACK


@pytest.mark.parametrize("shape", [(4, 5), (3, 3, 3)])
def test_gowers_triangle(rng, shape):
    for _ in range(500):
        a, b = random_kernel(rng, shape), random_kernel(rng, shape)
        assert box_norm(a + b) <= box_norm(a) + box_norm(b) + SLACK


def test_vdc_bound(rng):
    for _ in range(500):
        K = random_kernel(rng, (4, 5))
        F1 = np.exp(2j * np.pi * rng.random((1, 5)))  # independent of coordinate 0
        F2 = rng.uniform(-1, 1, (4, 1))  # independent of coordinate 1
        lhs, rhs = gowers.vdc_bound_check(K, [F1, F2])
        assert lhs <= rhs + SLACK


def test_vdc_rejects_bad_factors(rng):
    K = random_kernel(rng, (3, 3))
    with pytest.raises(InputError):
        gowers.vdc_bound_check(K, [np.ones((3, 3)) * 2, np.ones((3, 1))])
    with pytest.raises(InputError):
        gowers.vdc_bound_check(K, [rng.random((3, 3)), np.ones((3, 1))])


def test_box_norm_zero_forces_zero_kernel():
    assert box_norm(BoxKernel(np.zeros((3, 3)))) == 0.0


def test_budget(rng):
    with pytest.raises(BudgetExceeded):
        gowers_inner_product([random_kernel(rng, (50, 50))] * 4, budgets={"box_pairs": 100})


@pytest.mark.parametrize("n", [16, 31, 64, 101])
def test_u2_equals_fourier_l4(rng, n):
    for _ in range(125):
        f = random_fn(rng, n, bounded=False)
        assert u_norm(f, 2) == pytest.approx(spectral_norm(dft(f), 4), rel=1e-9)


@pytest.mark.parametrize("d,n", [(1, 32), (2, 32), (3, 17), (3, 32)])
def test_recursive_matches_full_average(rng, d, n):
    for _ in range(5):
        f = random_fn(rng, n)
        assert u_norm(f, d) == pytest.approx(u_norm_full(f, d), rel=1e-9)


@pytest.mark.parametrize("d,n", [(2, 7), (3, 5)])
def test_u_norm_is_box_norm_of_sum_kernel(rng, d, n):
    f = random_fn(rng, n)
    idx = sum(np.ix_(*([np.arange(n)] * d)))
    K = BoxKernel(f.values[idx % n])
    assert box_norm(K) == pytest.approx(u_norm(f, d), rel=1e-9)


def test_monotone_in_d(rng):
    for _ in range(500):
        n = int(rng.choice([7, 11, 13]))
        f = random_fn(rng, n)
        norms = [u_norm(f, d) for d in (1, 2, 3, 4)]
        assert all(a <= b + SLACK for a, b in zip(norms, norms[1:]))


def test_u_norm_budgets_and_range(rng):
    with pytest.raises(InputError):
        u_norm(random_fn(rng, 5), 5)
    with pytest.raises(BudgetExceeded):
        u_norm(random_fn(rng, 600), 3)


@pytest.mark.parametrize("n", [16, 31, 64, 101])
def test_dual_pairing(rng, n):
    trials = 30 if n <= 64 else 5
    for _ in range(trials):
        f = random_fn(rng, n)
        assert gowers.dual_pairing(f, f) == pytest.approx(u_norm(f, 3) ** 8, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("k,n", [(3, 11), (4, 11), (5, 7)])
def test_reparametrization_matches_direct(rng, k, n):
    from gowerslab.ap_forms import lambda_k

    fs = [random_fn(rng, n) for _ in range(k)]
    direct = lambda_k(fs, path="dense")
    for j in range(k):
        assert abs(gowers.lambda_k_reparametrized(fs, j) - direct) < 1e-12


@pytest.mark.parametrize("k", [3, 4])
def test_generalized_von_neumann(rng, k):
    for i in range(500):
        n = [11, 13, 17][i % 3]
        fs = [random_fn(rng, n) for _ in range(k)]
        lam, bound = gowers.gvn_bound_check(fs, cross_check=(i % 50 == 0))
        assert lam <= bound + SLACK


def test_gvn_preconditions(rng):
    with pytest.raises(InputError):
        gowers.gvn_bound_check([random_fn(rng, 12)] * 3)
    with pytest.raises(InputError):
        gowers.gvn_bound_check([random_fn(rng, 11, bounded=False).scale(5)] * 3)
    with pytest.raises(InputError):
        gowers.gvn_bound_check([random_fn(rng, 11)] * 6)


def test_quadratic_phase_u3_is_one(rng):
    n = 101
    for _ in range(10):
        a, b, c = (int(v) for v in rng.integers(0, n, 3))
        assert u_norm(polynomial_phase(n, [c, b, a]), 3) == pytest.approx(1.0, abs=1e-9)


def test_clamp_rejects_large_negative():
    with pytest.raises(InvariantViolation):
        gowers._clamp_power(-1.0, 1.0, "test")
    assert gowers._clamp_power(-1e-13, 1.0, "test") == 0.0


@pytest.mark.parametrize("n", [101, 257, 509])
def test_cubic_phase_u3_eighth_power_exact(n):
    # for prime N > 3 the U^3 average of e_N(x^3) leaves only the h1 h2 h3 = 0 terms
    u = u_norm(polynomial_phase(n, [0, 0, 0, 1]), 3)
    assert u**8 == pytest.approx((2 * n - 1) / n**2, rel=1e-9)


def test_cubic_phase_u3_is_order_n_to_minus_one_eighth():
    # the norm itself decays only like (2/N)^(1/8), much slower than N^(-1/2)
    for n in (101, 509):
        u = u_norm(polynomial_phase(n, [0, 0, 0, 1]), 3)
        assert u == pytest.approx((2 / n) ** 0.125, rel=0.01)
        assert u > 5 / np.sqrt(n)


def test_lambda4_quadratic_phase_conjugation_pattern(rng):
    from gowerslab.ap_forms import lambda_k

    n = 101
    for _ in range(10):
        a, b, c = (int(v) for v in rng.integers(0, n, 3))
        f = polynomial_phase(n, [c, b, a])
        # (1, -3, 3, -1) kills the second differences of a quadratic along x + j r
        f3 = f * f * f
        pattern = [f, f3.conj(), f3, f.conj()]
        assert lambda_k(pattern) == pytest.approx(1.0, abs=1e-9)
        # the naive alternating pattern does not
        if a % n:
            assert abs(lambda_k([f, f.conj(), f, f.conj()])) < 0.1
