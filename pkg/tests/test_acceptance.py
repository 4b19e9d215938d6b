"""End-to-end acceptance suite.

Each test exercises one shipped guarantee at its stated tolerance and
prints a single pass/fail line (run with ``pytest -s`` to see them all).
Every run is fully seeded, so reruns are reproducible.
"""

import math

import numpy as np

from qrandlab import bounds, cli, hiding, locking, pqc, randomizer
from qrandlab.matcore import projector
from qrandlab.randomizer import RandomizingMap, measure_epsilon
from qrandlab.sampler import SeededStream, build_ensemble, haar_pure_states

EULER_GAMMA = 0.5772156649015329


def _verdict(number: int, description: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"criterion {number:02d} [{status}] {description}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_criterion_01_exact_weyl_randomization():
    worst = 0.0
    for d in range(2, 9):
        rmap = RandomizingMap(build_ensemble(d, d * d, "weyl", SeededStream(100 + d)))
        probe = haar_pure_states(d, 100, SeededStream(200 + d))
        rep = measure_epsilon(rmap, probe, "haar-samples")
        worst = max(worst, rep.epsilon_emp)
    _verdict(
        1,
        "full shift-and-clock set randomizes every state exactly",
        worst <= 1e-10,
        f"max scaled deviation {worst:.3e}",
    )


def test_criterion_02_haar_entropy_mean():
    d, count, target = 16, 20_000, 3.434668
    states = haar_pure_states(d, count, SeededStream(300))
    probs = np.abs(states) ** 2
    clipped = np.where(probs > 1e-15, probs, 1.0)
    means = float(np.mean(-(clipped * np.log2(clipped)).sum(axis=1)))
    _verdict(
        2,
        "mean measurement entropy of uniform states matches the deficit formula",
        abs(means - target) <= 0.01,
        f"mean {means:.6f} vs {target}",
    )


def test_criterion_03_entropy_deficit_window():
    deficits = locking.delta_d_range(4096)[7 - 2 :]
    window_ok = bool(np.all((deficits > 0.5) & (deficits < 1.0)))
    harmonics = np.cumsum(1.0 / np.arange(1, 4097))
    ds = np.arange(7, 4097)
    gaps = harmonics[6:] - np.log(ds) - EULER_GAMMA
    sandwich_ok = bool(np.all((gaps > 1.0 / (2 * (ds + 1))) & (gaps < 1.0 / (2 * ds))))
    _verdict(
        3,
        "entropy deficit stays in (1/2, 1) and the harmonic sandwich holds on [7, 4096]",
        window_ok and sandwich_ok,
    )


def test_criterion_04_pauli_trace_norm_expectation():
    details = []
    ok = True
    for n in (64, 256):
        rep = bounds.pauli_trace_norm_experiment(16, n, 50, 20, SeededStream(400 + n))
        ok = ok and rep.within_bound
        details.append(f"n={n}: mean {rep.grand_mean:.4f} <= {rep.bound:.4f}+3se")
    _verdict(4, "Pauli-word mixtures meet the sqrt(d/n) trace-norm budget", ok, "; ".join(details))


def test_criterion_05_epsilon_scaling():
    d = 32
    medians = []
    for i, n in enumerate((256, 512, 1024, 2048)):
        rmap = RandomizingMap(build_ensemble(d, n, "haar", SeededStream(500 + i)))
        rep = measure_epsilon(rmap, haar_pure_states(d, 100, SeededStream(600 + i)), "haar-samples")
        medians.append(float(np.median(rep.per_state)))
    ratios = [medians[i + 1] / medians[i] for i in range(3)]
    decreasing = all(m2 < m1 for m1, m2 in zip(medians, medians[1:]))
    in_band = all(0.6 <= r <= 0.85 for r in ratios)
    _verdict(
        5,
        "median deviation shrinks like 1/sqrt(n) as the ensemble doubles",
        decreasing and in_band,
        "ratios " + ", ".join(f"{r:.3f}" for r in ratios),
    )


def test_criterion_06_entanglement_survival():
    rmap = RandomizingMap(build_ensemble(16, 32, "haar", SeededStream(700)))
    result = randomizer.entangled_probe(rmap)
    ok = result.choi_rank == 32 and result.trace_distance_lower >= 1.74
    _verdict(
        6,
        "half-randomized maximal entanglement keeps rank n and stays far from uniform",
        ok,
        f"rank {result.choi_rank}, distance {result.trace_distance_lower:.4f}",
    )


def test_criterion_07_pgm_overlap_expectation():
    d, p, n, draws = 8, 4, 8, 200
    expected = (n - 1) * p / (d * d)
    vals = np.array(
        [hiding.delta_ij(hiding.build_scheme(d, p, n, SeededStream(800).child(t)), 0, 0) for t in range(draws)]
    )
    se = vals.std(ddof=1) / math.sqrt(draws)
    ok = abs(vals.mean() - expected) <= 3 * se
    _verdict(
        7,
        "mean pairwise-overlap budget matches (n-1)p/d^2",
        ok,
        f"mean {vals.mean():.4f} vs {expected} within 3se={3 * se:.4f}",
    )


def test_criterion_08_hiding_round_trip():
    d, p, n, states = 16, 4, 8, 100
    total = d * d
    scheme = hiding.build_scheme(d, p, n, SeededStream(900))
    ops, failure = hiding.decoder_kraus(scheme)
    acc = failure.conj().T @ failure
    for k in ops:
        acc = acc + k.conj().T @ k
    kraus_ok = float(np.max(np.abs(acc - np.eye(total)))) <= 1e-8
    # the discrimination inequality is asserted inside delta_ij for every pair
    for i in range(n):
        for j in range(p):
            hiding.delta_ij(scheme, i, j)
    fids = []
    stream = SeededStream(901)
    for t, phi in enumerate(haar_pure_states(p, states, stream.child(0))):
        key = int(stream.child(1, t).rng().integers(0, n))
        outcome = hiding.decode(scheme, hiding.encode(scheme, phi, key=key))
        fids.append(float((phi.conj() @ outcome.recovered @ phi).real))
    floor = 1.0 - 3.0 * (n - 1) * p / (2.0 * total) - 0.05
    mean_fid = float(np.mean(fids))
    _verdict(
        8,
        "hidden states decode with high fidelity and a complete Kraus set",
        kraus_ok and mean_fid >= 0.78,
        f"mean fidelity {mean_fid:.4f} >= {floor:.4f}, kraus ok {kraus_ok}",
    )


def test_criterion_09_hiding_security_trend():
    d, p = 8, 2
    phi0 = np.zeros(p, dtype=complex)
    phi1 = np.zeros(p, dtype=complex)
    phi0[0] = phi1[1] = 1.0
    medians = []
    for i, n in enumerate((16, 64, 256)):
        scheme = hiding.build_scheme(d, p, n, SeededStream(1000 + i))
        probes = [
            hiding.security_probe(scheme, phi0, phi1, hiding.random_product_povm(d, SeededStream(1100).child(i, k)))
            for k in range(50)
        ]
        medians.append(float(np.median(probes)))
    decreasing = medians[0] > medians[1] > medians[2]
    exact = hiding.build_scheme(d, p, (d * d) ** 2, SeededStream(1200), kind="weyl")
    weyl_probe = hiding.security_probe(
        exact, phi0, phi1, hiding.random_product_povm(d, SeededStream(1201))
    )
    _verdict(
        9,
        "product measurements lose track of the hidden state as n grows; exact scrambling blinds them",
        decreasing and weyl_probe <= 1e-9,
        "medians " + ", ".join(f"{m:.4f}" for m in medians) + f"; exact probe {weyl_probe:.2e}",
    )


def test_criterion_10_holevo_accounting():
    chi_weyl_max = 0.0
    for d in (8, 32):
        rmap = RandomizingMap(build_ensemble(d, d * d, "weyl", SeededStream(1300 + d)))
        inputs = [(1 / 16, projector(s)) for s in haar_pure_states(d, 16, SeededStream(1400 + d))]
        chi_weyl_max = max(chi_weyl_max, pqc.holevo_quantity(rmap, inputs))
    rmap = RandomizingMap(build_ensemble(32, 1024, "haar", SeededStream(1500)))
    states = haar_pure_states(32, 16, SeededStream(1501))
    inputs = [(1 / 16, projector(s)) for s in states]
    chi = pqc.holevo_quantity(rmap, inputs)
    eps = measure_epsilon(rmap, states, "haar-samples").epsilon_emp
    ceiling = pqc.holevo_bound(eps)
    ok = chi_weyl_max <= 1e-9 and chi <= ceiling + 1e-6
    _verdict(
        10,
        "keyless leakage vanishes exactly for the full set and respects log2(1+eps) empirically",
        ok,
        f"weyl chi {chi_weyl_max:.2e}; haar chi {chi:.4f} <= {ceiling:.4f}",
    )


def test_criterion_11_rate_function_floor():
    floor_ok = True
    for k in range(1, 100):
        eps = k / 100
        floor = eps * eps / 6
        floor_ok = floor_ok and bounds.rate_function_exp(1 + eps) >= floor
        floor_ok = floor_ok and bounds.rate_function_exp(1 - eps) >= floor
    rng = np.random.default_rng(2)
    convex_ok = True
    for _ in range(100):
        x0, x1 = np.sort(rng.uniform(0.05, 6.0, size=2))
        mid = bounds.rate_function_exp((x0 + x1) / 2)
        convex_ok = convex_ok and mid <= (
            bounds.rate_function_exp(x0) + bounds.rate_function_exp(x1)
        ) / 2 + 1e-12
    _verdict(11, "the exponential rate function clears eps^2/6 on both tails and is convex", floor_ok and convex_ok)


def test_criterion_12_net_construction():
    net = randomizer.build_state_net(2, 0.5, SeededStream(1600))
    m = len(net.points)
    overlap = np.abs(net.points.conj() @ net.points.T) ** 2
    np.fill_diagonal(overlap, 0.0)
    dists = 2.0 * np.sqrt(np.clip(1.0 - overlap, 0.0, None))
    np.fill_diagonal(dists, np.inf)
    packing_ok = float(dists.min()) >= 0.5
    audit = randomizer.covering_audit(net, 10_000, SeededStream(1601))
    _verdict(
        12,
        "greedy packing at radius 0.5 on qubit states covers all fresh samples",
        packing_ok and m <= 10_000 and audit.covered_fraction == 1.0,
        f"size {m}, min distance {float(dists.min()):.4f}, covered {audit.covered_fraction:.4f}",
    )


def test_criterion_13_mub_entropic_uncertainty():
    state = locking.mub_pair_state(16)
    best, _, _ = locking.minimize_average_entropy(
        state, SeededStream(1700), locking.OptimizerConfig(restarts=50, iterations=500)
    )
    _verdict(
        13,
        "computational+Fourier pair keeps at least half the maximal entropy",
        best >= 2.0 - 1e-3,
        f"minimum found {best:.6f} bits",
    )


def test_criterion_14_determinism():
    configs = [
        ("randomize", {"d": 16, "n": 128, "states": 50, "seed": 77}),
        ("hide", {"d": 8, "p": 2, "n": 4, "trials": 20, "seed": 78}),
        ("net", {"d": 2, "eps": 0.5, "seed": 79, "audit": 2000}),
    ]
    ok = True
    for command, params in configs:
        first = cli.run(command, dict(params))
        second = cli.run(command, dict(params))
        ok = ok and first.stats_blob() == second.stats_blob()
        ok = ok and first.csv_bytes() == second.csv_bytes()
    _verdict(14, "identical seeds reproduce the statistics section byte for byte", ok)
