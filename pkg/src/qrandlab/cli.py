"""Experiment runner.

Usage::

    qrand <command> [flags] [--config file.json] [--out base] [--no-figure]

Commands: randomize, pqc, hide, lock, uncertainty, bounds, net.  A JSON
config file supplies defaults that explicit flags override.  Each run
writes ``<out>.csv`` (per-trial rows), ``<out>.json`` (summary) and
``<out>.png`` (figure) atomically, and exits 0 when every hard check
passed, 2 when the run finished with failed checks, 1 on usage or I/O
errors.  ``QRAND_THREADS`` caps the worker thread count for trial-level
parallelism (default 1).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, bounds, hiding, locking, pqc, randomizer
from .matcore import projector, von_neumann_entropy
from .reports import ExperimentReport, write_report
from .sampler import SeededStream, build_ensemble, haar_pure_states

COMMANDS = ("randomize", "pqc", "hide", "lock", "uncertainty", "bounds", "net")


def worker_count() -> int:
    raw = os.environ.get("QRAND_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map over trials, threaded when QRAND_THREADS > 1."""
    workers = worker_count()
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class UsageError(Exception):
    pass


REQUIRED = {
    "randomize": ("d", "n", "states", "seed"),
    "pqc": ("d", "kind", "seed"),
    "hide": ("d", "p", "n", "trials", "seed"),
    "lock": ("d", "n", "restarts", "seed"),
    "uncertainty": ("d", "n", "trials", "seed"),
    "bounds": ("d", "n", "draws", "states", "seed"),
    "net": ("d", "eps", "seed"),
}

POSITIVE_KEYS = ("d", "n", "p", "states", "trials", "restarts", "draws", "iters", "inputs", "audit")


def validate_config(command: str, params: dict) -> dict:
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    for key in REQUIRED[command]:
        if params.get(key) is None:
            raise UsageError(f"missing required parameter --{key} for {command}")
    try:
        for key in POSITIVE_KEYS + ("seed",):
            if params.get(key) is not None:
                params[key] = int(params[key])
        if params.get("eps") is not None:
            params["eps"] = float(params["eps"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"non-numeric parameter value: {exc}") from exc
    for key in POSITIVE_KEYS:
        if params.get(key) is not None and params[key] < 1:
            raise UsageError(f"parameter --{key} must be a positive integer")
    if params.get("eps") is not None and not (0.0 < params["eps"] < 1.0):
        raise UsageError("parameter --eps must lie in (0, 1)")
    if params.get("kind") is not None and params["kind"] not in ("haar", "weyl", "pauli"):
        raise UsageError("parameter --kind must be haar, weyl or pauli")
    if params.get("seed") is not None and params["seed"] < 0:
        raise UsageError("parameter --seed must be nonnegative")
    return params


def run_randomize(params: dict) -> ExperimentReport:
    d, n, states, seed = params["d"], params["n"], params["states"], params["seed"]
    kind = params.get("kind") or "haar"
    stream = SeededStream(seed)
    rmap = randomizer.RandomizingMap(build_ensemble(d, n, kind, stream.child(0)))
    probe = haar_pure_states(d, states, stream.child(1))
    rep = randomizer.measure_epsilon(rmap, probe, "haar-samples")
    out = randomizer.apply_map_pure(rmap, probe[0])
    flags = {"map_preserves_trace": abs(float(np.trace(out).real) - 1.0) <= 1e-10}
    if kind == "weyl" and n == d * d:
        flags["exact_randomization"] = rep.epsilon_emp <= 1e-10
    report = ExperimentReport("randomize", params, __version__)
    report.columns = ["state_index", "deviation"]
    report.rows = [(i, float(v)) for i, v in enumerate(rep.per_state)]
    report.stats = {
        "epsilon_emp": rep.epsilon_emp,
        "deviation_mean": float(rep.per_state.mean()),
        "deviation_median": float(np.median(rep.per_state)),
        "deviation_min": float(rep.per_state.min()),
        "state_source": rep.state_source,
    }
    report.flags = flags
    return report


def run_pqc(params: dict) -> ExperimentReport:
    d, kind, seed = params["d"], params["kind"], params["seed"]
    n = params.get("n") or (d * d if kind == "weyl" else 64)
    inputs = params.get("inputs") or 8
    stream = SeededStream(seed)
    rmap = randomizer.RandomizingMap(build_ensemble(d, n, kind, stream.child(0)))
    probe = haar_pure_states(d, inputs, stream.child(1))
    keys = stream.child(2).rng().integers(0, n, size=inputs)
    round_trip_err = 0.0
    for psi, key in zip(probe, keys):
        rho = projector(psi)
        back = pqc.decrypt(rmap, int(key), pqc.encrypt(rmap, int(key), rho))
        round_trip_err = max(round_trip_err, float(np.max(np.abs(back - rho))))
    ensemble_in = [(1.0 / inputs, projector(psi)) for psi in probe]
    chi = pqc.holevo_quantity(rmap, ensemble_in)
    dev = randomizer.measure_epsilon(rmap, probe, "haar-samples")
    bound = pqc.holevo_bound(dev.epsilon_emp)
    report = ExperimentReport("pqc", params, __version__)
    report.columns = ["input_index", "deviation", "output_entropy"]
    report.rows = [
        (i, float(dev.per_state[i]), von_neumann_entropy(randomizer.apply_map(rmap, rho)))
        for i, (_, rho) in enumerate(ensemble_in)
    ]
    report.stats = {
        "chi_bits": chi,
        "epsilon_emp": dev.epsilon_emp,
        "holevo_ceiling": bound,
        "round_trip_error": round_trip_err,
    }
    report.flags = {
        "round_trip_identity": round_trip_err <= 1e-12,
        "holevo_within_ceiling": chi <= bound + 1e-6,
    }
    if kind == "weyl" and n == d * d:
        report.flags["holevo_zero_exact"] = chi <= 1e-9
    return report


def run_hide(params: dict) -> ExperimentReport:
    d, p, n, trials, seed = params["d"], params["p"], params["n"], params["trials"], params["seed"]
    stream = SeededStream(seed)
    total = d * d
    expected_delta = (n - 1) * p / total
    fidelity_floor = 1.0 - 3.0 * (n - 1) * p / (2.0 * total) - 0.05

    def one_trial(t: int):
        scheme = hiding.build_scheme(d, p, n, stream.child(0, t))
        delta = hiding.delta_ij(scheme, 0, 0)
        ops, failure = hiding.decoder_kraus(scheme)
        acc = failure.conj().T @ failure
        for k in ops:
            acc = acc + k.conj().T @ k
        kraus_residual = float(np.max(np.abs(acc - np.eye(total))))
        phi = haar_pure_states(p, 1, stream.child(1, t))[0]
        key = int(stream.child(2, t).rng().integers(0, n))
        outcome = hiding.decode(scheme, hiding.encode(scheme, phi, key=key))
        fid = float((phi.conj() @ outcome.recovered @ phi).real)
        return delta, fid, kraus_residual

    results = parallel_map(one_trial, range(trials))
    deltas = np.array([r[0] for r in results])
    fids = np.array([r[1] for r in results])
    kraus = np.array([r[2] for r in results])
    se = float(deltas.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    report = ExperimentReport("hide", params, __version__)
    report.columns = ["trial", "delta", "fidelity", "kraus_residual"]
    report.rows = [(t, float(deltas[t]), float(fids[t]), float(kraus[t])) for t in range(trials)]
    report.stats = {
        "delta_mean": float(deltas.mean()),
        "delta_se": se,
        "expected_delta": expected_delta,
        "fidelity_mean": float(fids.mean()),
        "fidelity_floor": fidelity_floor,
        "kraus_residual_max": float(kraus.max()),
    }
    report.flags = {
        "delta_mean_within_3se": abs(float(deltas.mean()) - expected_delta) <= 3.0 * se if trials > 1 else True,
        "fidelity_above_floor": float(fids.mean()) >= fidelity_floor,
        "kraus_complete": float(kraus.max()) <= 1e-8,
    }
    return report


def run_lock(params: dict) -> ExperimentReport:
    d, n, restarts, seed = params["d"], params["n"], params["restarts"], params["seed"]
    iters = params.get("iters") or 500
    stream = SeededStream(seed)
    config = locking.OptimizerConfig(restarts=restarts, iterations=iters)
    state = locking.haar_basis_state(d, n, stream.child(0))
    lock_report = locking.ic_upper_bound(state, stream.child(1), config)
    r1, r2 = locking.figures_of_merit(lock_report)
    finals = lock_report.optimizer_trace["restart_finals"]
    report = ExperimentReport("lock", params, __version__)
    report.columns = ["restart", "final_entropy"]
    report.rows = [(i, float(v)) for i, v in enumerate(finals)]
    report.stats = {
        "best_entropy": lock_report.best_average_entropy,
        "ic_upper": lock_report.ic_upper,
        "ic_unlocked": lock_report.ic_unlocked,
        "r1_upper": r1,
        "r2_upper": r2,
    }
    report.flags = {
        "optimizer_at_or_below_starts": lock_report.best_average_entropy
        <= lock_report.optimizer_trace["start_entropy_min"] + 1e-12,
        "entropy_within_log_d": lock_report.best_average_entropy <= math.log2(d) + 1e-9,
    }
    return report


def run_uncertainty(params: dict) -> ExperimentReport:
    d, n, trials, seed = params["d"], params["n"], params["trials"], params["seed"]
    restarts = params.get("restarts") or 20
    iters = params.get("iters") or 300
    stream = SeededStream(seed)
    config = locking.OptimizerConfig(restarts=restarts, iterations=iters)
    result = locking.entropy_concentration_experiment(d, n, trials, stream, config)
    report = ExperimentReport("uncertainty", params, __version__)
    report.columns = ["trial", "best_entropy"]
    report.rows = [(t, float(v)) for t, v in enumerate(result.best_entropies)]
    report.stats = {
        "best_entropy_min": float(result.best_entropies.min()),
        "best_entropy_median": float(np.median(result.best_entropies)),
        "best_entropy_mean": float(result.best_entropies.mean()),
    }
    for eps, frac in sorted(result.fraction_below.items()):
        report.stats[f"fraction_below_eps_{eps:g}"] = frac
    report.flags = {
        "all_above_logd_minus_3": bool(np.all(result.best_entropies > math.log2(d) - 3.0)),
    }
    return report


def run_bounds(params: dict) -> ExperimentReport:
    d, n, draws, states, seed = (
        params["d"],
        params["n"],
        params["draws"],
        params["states"],
        params["seed"],
    )
    stream = SeededStream(seed)
    result = bounds.pauli_trace_norm_experiment(d, n, draws, states, stream)
    report = ExperimentReport("bounds", params, __version__)
    report.columns = ["sample_index", "deviation"]
    report.rows = [(i, float(v)) for i, v in enumerate(result.deviations)]
    report.stats = {
        "grand_mean": result.grand_mean,
        "std_error": result.std_error,
        "bound": result.bound,
        "epsilon_theory": math.sqrt(d * math.log2(d) / n),
        "deviation_median": float(np.median(result.deviations)),
    }
    report.flags = {"mean_within_bound": result.within_bound}
    return report


def run_net(params: dict) -> ExperimentReport:
    d, eps, seed = params["d"], float(params["eps"]), params["seed"]
    audit_count = params.get("audit") or 10000
    stream = SeededStream(seed)
    net = randomizer.build_state_net(d, eps, stream.child(0))
    audit = randomizer.covering_audit(net, audit_count, stream.child(1))
    m = len(net.points)
    overlap = np.abs(net.points.conj() @ net.points.T) ** 2
    np.fill_diagonal(overlap, 0.0)
    nearest = 2.0 * np.sqrt(np.clip(1.0 - overlap.max(axis=1), 0.0, None))
    size_bound = (5.0 / eps) ** (2 * d)
    report = ExperimentReport("net", params, __version__)
    report.columns = ["point_index", "nearest_distance"]
    report.rows = [(i, float(v)) for i, v in enumerate(nearest)]
    report.stats = {
        "net_size": m,
        "min_pairwise_distance": float(nearest.min()) if m > 1 else 2.0,
        "covered_fraction": audit.covered_fraction,
        "max_nearest_sample_distance": audit.max_nearest_distance,
        "size_bound": size_bound,
    }
    report.flags = {
        "packing_distances_ok": (m < 2) or float(nearest.min()) >= eps - 1e-12,
        "covering_complete": audit.covered_fraction >= 1.0,
        "size_within_bound": m <= size_bound,
    }
    return report


RUNNERS = {
    "randomize": run_randomize,
    "pqc": run_pqc,
    "hide": run_hide,
    "lock": run_lock,
    "uncertainty": run_uncertainty,
    "bounds": run_bounds,
    "net": run_net,
}


def run(command: str, params: dict) -> ExperimentReport:
    """Dispatch one experiment; deterministic given (command, params)."""
    params = validate_config(command, dict(params))
    start = time.perf_counter()
    report = RUNNERS[command](params)
    report.wall_seconds = time.perf_counter() - start
    return report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="qrand", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command")
    specs = {
        "randomize": ("d", "n", "states", "kind"),
        "pqc": ("d", "n", "kind", "inputs"),
        "hide": ("d", "p", "n", "trials"),
        "lock": ("d", "n", "restarts", "iters"),
        "uncertainty": ("d", "n", "trials", "restarts", "iters"),
        "bounds": ("d", "n", "draws", "states"),
        "net": ("d", "audit"),
    }
    for command, keys in specs.items():
        sp = sub.add_parser(command)
        for key in keys:
            if key == "kind":
                sp.add_argument("--kind", choices=("haar", "weyl", "pauli"))
            else:
                sp.add_argument(f"--{key}", type=int)
        if command == "net":
            sp.add_argument("--eps", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--config", type=str)
        sp.add_argument("--out", type=str)
        sp.add_argument("--no-figure", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a command is required (one of: %s)" % ", ".join(COMMANDS))
        params: dict = {}
        if args.config:
            try:
                with open(args.config) as fh:
                    params.update(json.load(fh))
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config file: {exc}") from exc
        for key, value in vars(args).items():
            if key in ("command", "config", "out", "no_figure") or value is None:
                continue
            params[key] = value
        report = run(args.command, params)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    base = args.out or f"{args.command}-report"
    try:
        paths = write_report(report, base)
        if not args.no_figure:
            from .figures import render_report_figure

            render_report_figure(report, base + ".png")
            paths["png"] = base + ".png"
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 1

    for name, value in sorted(report.stats.items()):
        print(f"{name}: {value}")
    for name, value in sorted(report.flags.items()):
        print(f"[{'pass' if value else 'FAIL'}] {name}")
    print("wrote " + " ".join(sorted(paths.values())))
    return 0 if report.passed else 2


if __name__ == "__main__":
    sys.exit(main())
