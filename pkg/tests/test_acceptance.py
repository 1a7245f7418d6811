"""Acceptance suite: one test per release criterion, tolerances pinned.

Monte Carlo checks run at a fixed seed, so every verdict here is
deterministic and reproducible.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from qkdsim.analysis import (fit_log_cubic, fit_sigmoid, savgol_smooth,
                             sigmoid_model, turning_point)
from qkdsim.channel import ChannelParams, transmission_probability
from qkdsim.experiments import SweepConfig, run_burst_sweep, run_distance_sweep
from qkdsim.keymgmt import binary_entropy, corrected_key_rate, xor_relay
from qkdsim.photonstats import pns_mutual_information, poisson_pmf
from qkdsim.protocols import (DECOY, E91, THREE_STAGE, IntensityLevel,
                              ProtocolSpec, run_round)
from qkdsim.streams import derive_stream
from qkdsim.topology import RoutePath


def _path(lengths, alphas=None):
    alphas = alphas or [0.15] * len(lengths)
    return RoutePath(tuple(range(len(lengths) + 1)), tuple(lengths), tuple(alphas))


def test_criterion_1_channel_exactness():
    """transmission_probability == 10**(-alpha*L/10) to 1e-12 on a 1000-point grid."""
    start = time.perf_counter()
    checked = 0
    for L in np.linspace(0.0, 300.0, 50):
        for alpha in np.linspace(0.05, 1.0, 20):
            assert abs(transmission_probability(L, alpha)
                       - 10.0 ** (-alpha * L / 10.0)) <= 1e-12
            checked += 1
    assert checked == 1000
    assert transmission_probability(10.0, 0.15) == pytest.approx(0.70795, abs=1e-5)
    assert transmission_probability(10.0, 0.4) == pytest.approx(0.39811, abs=1e-5)
    assert time.perf_counter() - start < 1.0


def test_criterion_2_monte_carlo_fidelity():
    """Each engine's empirical delivery rate matches its closed form within
    3*sqrt(p*(1-p)/N) on five configurations per protocol; under 30 s."""
    start = time.perf_counter()
    N = 100_000
    ch = ChannelParams()
    p10 = 10.0 ** (-0.15)          # single-traversal 10 km survival
    signal_only = (IntensityLevel(0.65, 1.0, "signal"),)
    vacuum_only = (IntensityLevel(0.0, 1.0, "vacuum"),)

    def burst(p, b):
        return 1.0 - (1.0 - p) ** b

    cases = [
        # --- 3-stage: delivery = 1 - (1 - p^3)^b, p^3 over thrice the path
        (ProtocolSpec(THREE_STAGE, burst_size=10), _path([10.0]), ch,
         burst(10.0 ** -0.45, 10)),
        (ProtocolSpec(THREE_STAGE, burst_size=1), _path([10.0]), ch,
         10.0 ** -0.45),
        (ProtocolSpec(THREE_STAGE, burst_size=50), _path([20.0]), ch,
         burst(10.0 ** -0.9, 50)),
        (ProtocolSpec(THREE_STAGE, burst_size=1000), _path([30.0]), ch,
         burst(10.0 ** -1.35, 1000)),
        (ProtocolSpec(THREE_STAGE, burst_size=10), _path([40.0]), ch,
         burst(10.0 ** -1.8, 10)),
        # --- E91: product of segment pairs, swaps, sifting
        (ProtocolSpec(E91, sifting_fraction=1.0), _path([10.0]), ch,
         burst(p10, 5)),
        (ProtocolSpec(E91, sifting_fraction=1.0), _path([5.0, 5.0]), ch,
         burst(10.0 ** -0.075, 5) ** 2 * 0.85),
        (ProtocolSpec(E91, sifting_fraction=1.0), _path([0.0, 0.0]), ch, 0.85),
        (ProtocolSpec(E91), _path([5.0, 5.0]), ch,
         0.5 * burst(10.0 ** -0.075, 5) ** 2 * 0.85),
        (ProtocolSpec(E91, redundancy=3, sifting_fraction=1.0), _path([20.0]), ch,
         burst(10.0 ** -0.3, 3)),
        # --- decoy: thinned-Poisson single-photon arrivals on signal pulses
        (ProtocolSpec(DECOY, intensities=signal_only, sifting_fraction=1.0),
         _path([0.0]), ch, 0.65 * math.exp(-0.65)),
        (ProtocolSpec(DECOY), _path([10.0]), ch,
         0.5 * 0.7 * 0.65 * p10 * math.exp(-0.65 * p10)),
        (ProtocolSpec(DECOY, intensities=signal_only, sifting_fraction=1.0),
         _path([5.0]), ch,
         0.65 * 10 ** -0.075 * math.exp(-0.65 * 10 ** -0.075)),
        (ProtocolSpec(DECOY, intensities=vacuum_only, sifting_fraction=1.0),
         _path([5.0]), ch, 0.0),
        (ProtocolSpec(DECOY, continuous_intensity=True, sifting_fraction=1.0),
         _path([0.0]), ch, (1.0 - 3.0 * math.exp(-2.0)) / 2.0),
    ]
    for idx, (spec, path, chan, expected) in enumerate(cases):
        stream = derive_stream(1000 + idx, 0, 0)
        hits = sum(run_round(stream, path, spec, chan).delivered for _ in range(N))
        p_hat = hits / N
        sigma = math.sqrt(max(expected * (1.0 - expected), 1e-12) / N)
        assert abs(p_hat - expected) <= 3 * sigma, (
            f"case {idx}: {p_hat:.6f} vs {expected:.6f} (3s={3*sigma:.2e})")
    assert time.perf_counter() - start < 30.0


def test_criterion_3_key_math():
    """Entropy endpoints exact, h(0.02) pinned, clamping, XOR relay bit-exact."""
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.02) == pytest.approx(0.14144, abs=1e-5)
    assert corrected_key_rate(1.0, 0.5) == 0.0
    assert corrected_key_rate(123.0, 0.5) == 0.0
    rng = np.random.default_rng(2024)
    successes = 0
    for trial in range(100):
        n_segments = 2 + trial % 9
        keys = [rng.integers(0, 2, 256).tolist() for _ in range(n_segments)]
        successes += xor_relay(keys) == keys[0]
    assert successes == 100


def test_criterion_4_photon_statistics():
    """Poisson pmf normalizes; Eve's information peaks at mu/8, symmetric."""
    for mu in (0.1, 0.5, 1.0, 2.0):
        total = sum(poisson_pmf(n, mu) for n in range(61))
        assert abs(total - 1.0) <= 1e-12
    for mu in (0.1, 0.65, 1.0, 2.0):
        values = [pns_mutual_information(mu, k / 100.0) for k in range(101)]
        assert max(values) == mu / 8.0
        assert values.index(max(values)) == 50
        for k in range(33):
            lam = k / 32.0
            assert pns_mutual_information(mu, lam) == pns_mutual_information(mu, 1.0 - lam)


def test_criterion_5_fit_recovery():
    """Sigmoid and log-cubic fitters recover generating parameters."""
    xs = np.arange(1.0, 61.0)
    truth = (0.655, 0.139, 25.303)
    fit = fit_sigmoid(xs, sigmoid_model(xs, *truth))
    assert fit.plateau == pytest.approx(truth[0], rel=1e-3)
    assert fit.decay_rate == pytest.approx(truth[1], rel=1e-3)
    assert fit.midpoint_km == pytest.approx(truth[2], rel=1e-3)

    rng = np.random.default_rng(123)
    for _ in range(20):
        noisy = sigmoid_model(xs, *truth) + rng.normal(0.0, 0.01, len(xs))
        f = fit_sigmoid(xs, noisy)
        assert f.plateau == pytest.approx(truth[0], rel=0.05)
        assert f.decay_rate == pytest.approx(truth[1], rel=0.05)
        assert f.midpoint_km == pytest.approx(truth[2], rel=0.05)

    coeffs = (-0.054, 1.228, 1.1878, 2.0178)
    bursts = [10 ** i for i in range(1, 7)]
    ds = [np.polyval(coeffs, math.log10(b)) for b in bursts]
    lf = fit_log_cubic(bursts, ds)
    for got, want in zip(lf.coefficients, coeffs):
        assert got == pytest.approx(want, abs=1e-6)
    assert lf.diagnostics.r_squared == pytest.approx(1.0, abs=1e-12)

    cubic = (0.000008, -0.003388, 0.538443, 1.693613)
    assert np.polyval(cubic, 50.0) == pytest.approx(21.1458, abs=1e-4)
    assert np.polyval(coeffs, 6.0) == pytest.approx(41.689, abs=1e-3)


# ---------------------------------------------------------------------------
# Criterion 6: qualitative figure reproduction at desk scale (fixed seed).

_C6_START = [time.perf_counter()]


def test_criterion_6a_direct_topology_orderings():
    distances = tuple(float(x) for x in range(5, 65, 5))
    _C6_START[0] = time.perf_counter()
    common = dict(distances=distances, rounds=100_000, master_seed=1,
                  sample_fraction=0.3)
    plain = run_distance_sweep(SweepConfig("direct", ProtocolSpec(E91), **common))
    # repeater variant: one midpoint repeater and redundant swapping
    repeater = run_distance_sweep(SweepConfig(
        "line", ProtocolSpec(E91, swap_redundancy=True),
        shape_params={"n_trusted": 1}, **common))
    for x, kr_rep, kr_plain in zip(distances, repeater.key_rates(), plain.key_rates()):
        if x >= 30.0:
            assert kr_rep > kr_plain, f"L={x}: repeater {kr_rep} <= plain {kr_plain}"

    three = run_distance_sweep(SweepConfig(
        "direct", ProtocolSpec(THREE_STAGE, sifting_fraction=1.0), **common))
    decoy = run_distance_sweep(SweepConfig("direct", ProtocolSpec(DECOY), **common))
    for x, kr_three, kr_decoy in zip(distances, three.key_rates(), decoy.key_rates()):
        if x <= 20.0:
            assert kr_three > kr_decoy, f"L={x}: 3-stage {kr_three} <= decoy {kr_decoy}"


def test_criterion_6b_grid_beats_line_for_three_stage():
    distances = tuple(float(x) for x in range(10, 70, 10))
    spec = ProtocolSpec(THREE_STAGE, sifting_fraction=1.0)
    common = dict(distances=distances, rounds=20_000, master_seed=1)
    grid = run_distance_sweep(SweepConfig("grid", spec, shape_params={"g": 3}, **common))
    line = run_distance_sweep(SweepConfig("line", spec, shape_params={"n_trusted": 1}, **common))
    for x, kr_grid, kr_line in zip(distances, grid.key_rates(), line.key_rates()):
        assert kr_grid >= kr_line, f"L={x}: grid {kr_grid} < line {kr_line}"


def test_criterion_6c_torus_three_stage_beats_e91():
    distances = (5.0, 10.0, 15.0, 20.0)
    common = dict(shape_params={"k": 3}, distances=distances, rounds=20_000,
                  master_seed=1)
    three = run_distance_sweep(SweepConfig(
        "torus", ProtocolSpec(THREE_STAGE, sifting_fraction=1.0), **common))
    e91 = run_distance_sweep(SweepConfig("torus", ProtocolSpec(E91), **common))
    for x, kr_three, kr_e91 in zip(distances, three.key_rates(), e91.key_rates()):
        assert kr_three >= 1.2 * kr_e91, (
            f"L={x}: 3-stage {kr_three} < 1.2x e91 {kr_e91}")


def test_criterion_6d_key_rate_non_decreasing_in_burst():
    cfg = SweepConfig("line", ProtocolSpec(THREE_STAGE, sifting_fraction=1.0),
                      shape_params={"n_trusted": 1}, distances=(20.0,),
                      bursts=(10, 50, 200, 1200), rounds=100_000, master_seed=1)
    family = run_burst_sweep(cfg)
    rates = [res.points[0].key_rate for _, res in family.curves]
    assert all(b >= a for a, b in zip(rates, rates[1:])), rates
    # the whole desk-scale reproduction block stays under five minutes
    assert time.perf_counter() - _C6_START[0] < 300.0


def test_criterion_7_stable_distance_law():
    """Turning points grow with burst size; log-cubic fit explains them."""
    start = time.perf_counter()
    cfg = SweepConfig("line", ProtocolSpec(THREE_STAGE, sifting_fraction=1.0),
                      shape_params={"n_trusted": 1},
                      distances=tuple(float(x) for x in range(1, 254, 4)),
                      bursts=(10, 100, 1000, 10_000, 100_000, 1_000_000),
                      rounds=50_000, master_seed=1, sample_fraction=0.25)
    family = run_burst_sweep(cfg)
    stable = []
    for b, result in family.curves:
        smooth = savgol_smooth(result.key_rates(), window=11, polyorder=3)
        stable.append(turning_point(result.xs(), smooth))
    assert all(b >= a for a, b in zip(stable, stable[1:])), stable
    assert stable[-1] < cfg.distances[-1], "grid too short: last curve never turned"
    fit = fit_log_cubic(list(family.burst_sizes()), stable)
    assert fit.diagnostics.r_squared >= 0.95, (stable, fit.diagnostics.r_squared)
    assert time.perf_counter() - start < 600.0


def test_criterion_8_thread_determinism():
    base = SweepConfig("ring", ProtocolSpec(THREE_STAGE, sifting_fraction=1.0),
                       shape_params={"m": 4}, distances=(10.0, 25.0, 40.0),
                       rounds=5000, master_seed=9)
    csvs = {run_distance_sweep(dataclasses.replace(base, threads=t)).to_csv()
            for t in (1, 4, 8)}
    assert len(csvs) == 1
