import numpy as np
import pytest

from qkdsim.keymgmt import (KeyPool, binary_entropy, corrected_key_rate,
                            estimate_qber, key_rate, xor_relay)


def _pool(bits_a, bits_b):
    return KeyPool((0, 1), list(bits_a), list(bits_b), rounds_attempted=len(bits_a))


def test_qber_identical_sequences():
    est = estimate_qber(_pool([0, 1, 1, 0], [0, 1, 1, 0]), 1.0)
    assert est.q == 0.0
    assert est.sample_size == 4
    assert not est.clamped


def test_qber_complementary_clamps():
    est = estimate_qber(_pool([0, 1, 0, 1], [1, 0, 1, 0]), 1.0)
    assert est.q == 0.5
    assert est.clamped


def test_qber_consumes_sample():
    pool = _pool([0] * 100, [0] * 100)
    est = estimate_qber(pool, 0.1)
    assert est.sample_size == 10
    assert len(pool) == 90


def test_qber_statistical_recovery():
    rng = np.random.default_rng(123)
    n = 100_000
    a = rng.integers(0, 2, n)
    flips = rng.random(n) < 0.02
    b = a ^ flips
    est = estimate_qber(_pool(a.tolist(), b.tolist()), 1.0)
    sigma = np.sqrt(0.02 * 0.98 / n)
    assert abs(est.q - 0.02) <= 3 * sigma


def test_qber_empty_pool_raises():
    with pytest.raises(ValueError):
        estimate_qber(_pool([], []), 0.5)


def test_binary_entropy_reference():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.02) == pytest.approx(0.14144, abs=1e-5)


def test_corrected_key_rate_endpoints():
    assert corrected_key_rate(3.5, 0.0) == 3.5
    assert corrected_key_rate(3.5, 0.5) == 0.0  # clamped; raw formula is negative
    assert corrected_key_rate(1.0, 0.02) == pytest.approx(0.71712, abs=1e-5)


def test_corrected_key_rate_monotone_and_linear():
    qs = np.linspace(0.0, 0.5, 26)
    rates = [corrected_key_rate(1.0, q) for q in qs]
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    for q in (0.0, 0.01, 0.05, 0.11):
        assert corrected_key_rate(7.0, q) == pytest.approx(7.0 * corrected_key_rate(1.0, q), rel=1e-12)


def test_xor_relay_single_segment():
    key = [1, 0, 1, 1, 0]
    assert xor_relay([key]) == key


def test_xor_relay_two_segments():
    k1 = [1, 0, 1, 0]
    k2 = [1, 1, 0, 0]
    # (k1 ^ k2) ^ k2 recovers k1
    assert xor_relay([k1, k2]) == k1


def test_xor_relay_long_chain_recovers_first_key():
    rng = np.random.default_rng(42)
    for trial in range(100):
        n_segments = 2 + trial % 9
        keys = [rng.integers(0, 2, 256).tolist() for _ in range(n_segments)]
        assert xor_relay(keys) == keys[0]


def test_xor_relay_truncates_to_shortest():
    k1 = [1, 0, 1, 1]
    k2 = [0, 1]
    assert xor_relay([k1, k2]) == [1, 0]


def test_xor_relay_empty_input_raises():
    with pytest.raises(ValueError):
        xor_relay([])


def test_key_rate_basics():
    assert key_rate(0, 1000) == 0.0
    assert key_rate(1000, 1000) == 1.0
    assert key_rate(71712, 100_000) == pytest.approx(0.71712, abs=1e-12)
    with pytest.raises(ValueError):
        key_rate(5, 0)
