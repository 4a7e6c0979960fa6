import itertools

import numpy as np
import pytest

from gowerslab import ap_forms
from gowerslab.ap_forms import APReport, count_aps, find_ap, lambda_k, varnavides_statistic
from gowerslab.errors import BudgetExceeded, InputError, InvariantViolation
from gowerslab.zmod import CyclicFn, dft, spectral_norm

from helpers import random_fn


def direct_lambda(fs):
    n = fs[0].modulus
    tot = 0j
    for x in range(n):
        for r in range(n):
            tot += np.prod([f.values[(x + j * r) % n] for j, f in enumerate(fs)])
    return tot / n**2


def test_constant_functions():
    for k in (3, 4, 5):
        assert lambda_k([CyclicFn.constant(9, 0.7)] * k) == pytest.approx(0.7**k)


def test_two_point_indicator():
    f = CyclicFn.indicator(5, [1, 2])
    assert lambda_k([f] * 3) == pytest.approx(2 / 25)
    assert direct_lambda([f] * 3) == pytest.approx(0.08)


@pytest.mark.parametrize("n", [16, 31, 64, 101])
def test_spectral_path_matches_direct(rng, n):
    for _ in range(10):
        fs = [random_fn(rng, n) for _ in range(3)]
        a = lambda_k(fs, path="spectral")
        b = lambda_k(fs, path="dense")
        assert abs(a - b) <= 1e-9 * max(abs(b), 1e-3)


@pytest.mark.parametrize("n", [20, 101, 512])
def test_sparse_path_matches_dense(rng, n):
    for k in (3, 4):
        f0 = random_fn(rng, n) * CyclicFn(n, rng.random(n) < 0.1)
        fs = [f0] + [random_fn(rng, n) for _ in range(k - 1)]
        assert abs(lambda_k(fs, path="sparse") - lambda_k(fs, path="dense")) < 1e-12


def test_multilinearity(rng):
    n = 13
    for k in (3, 4):
        fs = [random_fn(rng, n) for _ in range(k)]
        g = random_fn(rng, n)
        a, b = 0.3 - 1.1j, 2.0
        for slot in range(k):
            mixed = list(fs)
            mixed[slot] = fs[slot].scale(a) + g.scale(b)
            alt = list(fs)
            alt[slot] = g
            lhs = lambda_k(mixed, path="dense")
            rhs = a * lambda_k(fs, path="dense") + b * lambda_k(alt, path="dense")
            assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))


def test_nonnegative_inputs_give_nonnegative_form(rng):
    for _ in range(20):
        f = CyclicFn(17, rng.random(17))
        v = lambda_k([f] * 4, path="dense")
        assert v.real >= 0 and abs(v.imag) < 1e-12


def test_errors(rng):
    with pytest.raises(InputError):
        lambda_k([random_fn(rng, 5)] * 2)
    with pytest.raises(InputError):
        lambda_k([random_fn(rng, 5), random_fn(rng, 5), random_fn(rng, 6)])
    with pytest.raises(InputError):
        lambda_k([random_fn(rng, 5)] * 4, path="spectral")
    with pytest.raises(BudgetExceeded):
        lambda_k([random_fn(rng, 50)] * 4, path="dense", budgets={"lambda_pairs": 100})


def test_young_type_bounds(rng):
    for _ in range(300):
        n = int(rng.choice([15, 31, 33, 101]))
        f, g, h = (random_fn(rng, n) for _ in range(3))
        val, b_inf, b_4 = ap_forms.young_bound(f, g, h)
        assert val <= b_inf + 1e-12
        assert val <= b_4 + 1e-12


def test_splitting_bound(rng):
    for _ in range(300):
        n = int(rng.choice([15, 31, 101]))
        f = CyclicFn(n, rng.random(n) * (rng.random(n) < rng.random()))
        dev, bound = ap_forms.splitting_check(f)
        assert dev <= bound + 1e-12


def test_norm_chain(rng):
    # ||bhat||_inf <= ||bhat||_4 <= ||bhat||_inf^(1/2) ||bhat||_2^(1/2) <= delta^(1/4) ||bhat||_inf^(1/2)
    for _ in range(500):
        n = int(rng.choice([16, 31, 64]))
        f = CyclicFn(n, rng.random(n) * (rng.random(n) < 0.5))
        delta = f.values.real.mean()
        s = dft(f - delta)
        linf, l4, l2 = (spectral_norm(s, p) for p in (np.inf, 4, 2))
        assert linf <= l4 + 1e-12
        assert l4 <= np.sqrt(linf * l2) + 1e-12
        assert np.sqrt(linf * l2) <= delta**0.25 * np.sqrt(linf) + 1e-12


def brute_count(A, k):
    s = set(A)
    N = max(A) if A else 0
    return sum(1 for n in s for r in range(1, N + 1) if all(n + j * r in s for j in range(k)))


def test_count_aps_examples():
    rep = count_aps(range(1, 6), 3)
    assert rep.count_nontrivial == 4 and rep.count_trivial == 5
    assert rep.witness == (1, 1) and rep.normalization == 25
    assert count_aps([], 3, N=10).count_nontrivial == 0
    powers = [2**i for i in range(7)]
    assert count_aps(powers, 3, N=64).count_nontrivial == brute_count(powers, 3) == 0
    assert count_aps(range(1, 6), 3, distinct_r_positive=False).count_nontrivial == 8


def test_count_aps_against_brute(rng):
    for _ in range(30):
        A = (np.flatnonzero(rng.random(60) < 0.4) + 1).tolist()
        for k in (3, 4):
            assert count_aps(A, k, N=60).count_nontrivial == brute_count(A, k)


def test_count_aps_errors():
    with pytest.raises(InputError):
        count_aps([0, 1, 2], 3, N=5)
    with pytest.raises(InputError):
        count_aps([1, 9], 3, N=5)


def test_report_reverifies_witness():
    with pytest.raises(InvariantViolation):
        APReport(3, 1, 3, (1, 2), 9, members=[1, 2, 3])
    rep = APReport(3, 1, 3, (1, 1), 9, members=[1, 2, 3])
    assert '"witness": [1, 1]' in rep.to_json()


def test_find_ap():
    assert find_ap([1, 2, 3], 3) == (1, 1)
    assert find_ap([1, 2, 4, 5], 3) is None
    primes = [p for p in range(2, 31) if all(p % d for d in range(2, p))]
    n, r = find_ap(primes, 4)
    assert all(n + j * r in primes for j in range(4))
    assert (n, r) == (5, 6)


def varnavides_oracle(A, N, M):
    s = {a % N for a in A}
    delta = len(s) / N
    hits = 0
    for a, b in itertools.product(range(N), repeat=2):
        pts = [(a + i * b) % N for i in range(1, M + 1)]
        if sum(p in s for p in pts) / M >= delta / 2:
            hits += 1
    return hits / N**2


def test_varnavides():
    assert varnavides_statistic(range(11), 11, 3) == 1.0
    assert varnavides_statistic([], 11, 3) == 0.0
    A = [1, 2, 3, 4, 5, 6]
    assert varnavides_statistic(A, 11, 3) == pytest.approx(varnavides_oracle(A, 11, 3), abs=0)
    with pytest.raises(InputError):
        varnavides_statistic(A, 12, 3)


def test_varnavides_lower_bound(rng):
    for _ in range(5):
        N = 31
        A = np.flatnonzero(rng.random(N) < 0.5).tolist()
        delta = len(A) / N
        assert varnavides_statistic(A, N, 5) >= delta / 2 - 1e-12


def test_cyclic_witnesses_lift_to_integers(rng):
    for _ in range(10):
        N = 40
        A = (np.flatnonzero(rng.random(N) < 0.4) + 1).tolist()
        found, lifted = ap_forms.cyclic_lift_check(A, N, 83)
        assert found == lifted == 2 * count_aps(A, 3, N=N).count_nontrivial
