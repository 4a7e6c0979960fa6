import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gowerslab.errors import InputError
from gowerslab.zmod import (
    CyclicFn,
    Spectrum,
    character,
    close,
    dft,
    expectation,
    idft,
    inner,
    lp_norm,
    modulate,
    phase,
    polynomial_phase,
    shift,
    spectral_norm,
)

from helpers import random_fn


def naive_dft(v):
    n = len(v)
    x = np.arange(n)
    return np.array([np.mean(v * np.exp(-2j * np.pi * x * xi / n)) for xi in range(n)])


@pytest.mark.parametrize("n", [1, 2, 7, 16, 31, 64, 97, 101])
def test_dft_matches_naive_oracle(rng, n):
    f = random_fn(rng, n)
    assert np.allclose(dft(f).coeffs, naive_dft(f.values), atol=1e-13)


@pytest.mark.parametrize("n", [16, 31, 64, 101])
def test_plancherel_and_inversion(rng, n):
    for _ in range(20):
        f = random_fn(rng, n, bounded=False)
        s = dft(f)
        assert close(lp_norm(f, 2), spectral_norm(s, 2))
        assert close(idft(s).values, f.values, abs_=1e-12)


def test_character_transform_is_delta():
    s = dft(character(12, 5))
    expected = np.zeros(12)
    expected[5] = 1
    assert np.allclose(s.coeffs, expected, atol=1e-14)


def test_constant_function():
    f = CyclicFn.constant(9, 2.5)
    assert expectation(f) == pytest.approx(2.5)
    assert dft(f)[0] == pytest.approx(2.5)
    assert spectral_norm(dft(f), np.inf) == pytest.approx(2.5)


def test_character_errors():
    with pytest.raises(InputError):
        character(5, 5)
    with pytest.raises(InputError):
        character(5, -1)


def test_norm_exponent_errors(rng):
    f = random_fn(rng, 5)
    with pytest.raises(InputError):
        lp_norm(f, 3)
    with pytest.raises(InputError):
        spectral_norm(dft(f), 0)
    assert lp_norm(f, "inf") == lp_norm(f, np.inf)


def test_norm_ordering(rng):
    f = random_fn(rng, 40, bounded=False)
    assert lp_norm(f, 1) <= lp_norm(f, 2) + 1e-12 <= lp_norm(f, 4) + 2e-12 <= lp_norm(f, np.inf) + 3e-12
    s = dft(f)
    assert spectral_norm(s, np.inf) <= spectral_norm(s, 4) + 1e-12 <= spectral_norm(s, 2) + 2e-12


def test_shift_and_modulate_duality(rng):
    n = 23
    f = random_fn(rng, n)
    h, xi = 5, 7
    # (T^h f)^(xi) = e_N(h xi) fhat(xi)
    lhs = dft(shift(f, h)).coeffs
    rhs = dft(f).coeffs * phase(n, np.arange(n) * h)
    assert np.allclose(lhs, rhs, atol=1e-13)
    # modulation shifts the spectrum
    assert np.allclose(dft(modulate(f, xi)).coeffs, np.roll(dft(f).coeffs, xi), atol=1e-13)
    assert f.shift(h)[0] == f[h]


def test_pointwise_ops(rng):
    f, g = random_fn(rng, 8), random_fn(rng, 8)
    assert np.allclose((f + g).values, f.values + g.values)
    assert np.allclose((f - g).values, f.values - g.values)
    assert np.allclose((f * g).values, f.values * g.values)
    assert np.allclose((-f).values, -f.values)
    assert np.allclose(f.conj().values, np.conj(f.values))
    assert np.allclose(f.scale(2j).values, 2j * f.values)
    assert np.allclose((1 - f).values, 1 - f.values)
    assert inner(f, f).real == pytest.approx(lp_norm(f, 2) ** 2)
    with pytest.raises(InputError):
        f + random_fn(rng, 9)


def test_validation():
    with pytest.raises(InputError):
        CyclicFn(0, [])
    with pytest.raises(InputError):
        CyclicFn(3, [1, 2])
    with pytest.raises(InputError):
        CyclicFn(2, [1, np.nan])
    with pytest.raises(InputError):
        Spectrum(3, [1])
    f = CyclicFn(3, [1, 2, 3])
    with pytest.raises(ValueError):
        f.values[0] = 5


def test_polynomial_phase_exact_reduction():
    n = 101
    f = polynomial_phase(n, [3, 5, 7])
    x = np.arange(n)
    assert np.allclose(f.values, np.exp(2j * np.pi * ((7 * x * x + 5 * x + 3) % n) / n), atol=1e-13)
    # huge coefficients are reduced exactly before the float conversion
    g = polynomial_phase(n, [0, 0, 7 + 10**30 * n])
    assert np.allclose(g.values, polynomial_phase(n, [0, 0, 7]).values, atol=0)


def test_json_round_trip(rng):
    f = random_fn(rng, 13)
    doc = json.dumps(f.to_json())
    g = CyclicFn.from_json(doc)
    assert np.array_equal(f.values, g.values)
    with pytest.raises(InputError):
        CyclicFn.from_json({"n": 3, "re": [1, 2]})


def test_binary_round_trip_is_bit_exact(rng):
    f = random_fn(rng, 17)
    data = f.to_bytes()
    assert len(data) == 8 + 16 * 17
    assert int.from_bytes(data[:8], "little") == 17
    g = CyclicFn.from_bytes(data)
    assert f.values.tobytes() == g.values.tobytes()
    with pytest.raises(InputError):
        CyclicFn.from_bytes(data[:-1])


def test_spectrum_argmax_ties():
    s = Spectrum(4, [1, 2, 2, 0.5])
    assert s.argmax() == 1
    assert Spectrum(3, [5, 1, 1]).argmax(exclude_zero=True) == 1


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=40))
def test_plancherel_property(vals):
    f = CyclicFn.from_values(vals)
    assert abs(lp_norm(f, 2) - spectral_norm(dft(f), 2)) <= 1e-9 * max(1.0, lp_norm(f, 2))
