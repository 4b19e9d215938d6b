"""Large-deviation evaluators and trace-norm randomization experiments.

Exponential bounds are reported with both a base-2 and a natural-log
exponent because the conventions in use disagree: probability texts use
exp(-n L), while the bit-counting convention here writes the same number
as exp2(-n L / ln 2).  Both describe one value, carried in ``value``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .randomizer import RandomizingMap, apply_map_pure
from .sampler import SeededStream, build_ensemble, haar_pure_states

LN2 = math.log(2.0)

#: Concentration constant for the squared-overlap rate function.
RATE_FLOOR_CONSTANT = 1.0 / (6.0 * LN2)

#: Lower bound on the sphere-concentration constant (only a bound is known).
LEVY_CONSTANT_LOWER = 1.0 / (220.0 * LN2)

#: Entropy-concentration constant derived from it by the Lipschitz step.
ENTROPY_CONCENTRATION_CONSTANT_LOWER = LEVY_CONSTANT_LOWER / 8.0


def rate_function_exp(x: float) -> float:
    """Rate function of a unit-mean exponential variable, in nats.

    |g|^2 of a complex standard normal is Exp(1), whose Legendre
    transform evaluates to x - 1 - ln x.
    """
    if x <= 0:
        raise ValueError("rate function domain is x > 0")
    return x - 1.0 - math.log(x)


@dataclass(frozen=True)
class RateFunctionSample:
    """One evaluated point of a rate function; zero exactly at the mean."""

    x: float
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("rate function values are nonnegative")


def sample_rate_function(
    xs, rate_fn: Callable[[float], float] = rate_function_exp
) -> list[RateFunctionSample]:
    """Tabulate a rate function on a grid of points."""
    return [RateFunctionSample(float(x), rate_fn(float(x))) for x in xs]


def _golden_min(f: Callable[[float], float], lo: float, hi: float, iters: int = 200) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < 1e-12 * max(1.0, abs(a)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return min(f(x), fc, fd)


def _assert_convex_on(f: Callable[[float], float], lo: float, hi: float) -> None:
    # midpoint test on a coarse grid; the infimum search assumes convexity
    xs = np.linspace(lo, hi, 33)
    for x0, x1 in zip(xs[:-1], xs[1:]):
        mid = (x0 + x1) / 2
        if f(mid) > (f(x0) + f(x1)) / 2 + 1e-9:
            raise ValueError(f"rate function not convex near [{x0}, {x1}]")


@dataclass(frozen=True)
class TailBound:
    """One evaluated exponential tail bound."""

    value: float
    exponent_base2: float
    exponent_nat: float
    rate_infimum: float
    n: int
    threshold: float
    side: str


def _tail(n: int, a: float, rate_inf: float, side: str) -> TailBound:
    nat = -n * rate_inf
    return TailBound(
        value=math.exp(nat),
        exponent_base2=nat / LN2,
        exponent_nat=nat,
        rate_infimum=rate_inf,
        n=n,
        threshold=a,
        side=side,
    )


def cramer_upper_tail(
    n: int, a: float, rate_fn: Callable[[float], float] = rate_function_exp
) -> TailBound:
    """Bound on Pr(sample mean >= a): exp2(-n inf_{x >= a} rate(x) / ln 2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    hi = max(4.0 * abs(a), a + 10.0, 10.0)
    _assert_convex_on(rate_fn, a, hi)
    inf = min(_golden_min(rate_fn, a, hi), rate_fn(a))
    return _tail(n, a, max(inf, 0.0), "upper")


def cramer_lower_tail(
    n: int, a: float, rate_fn: Callable[[float], float] = rate_function_exp
) -> TailBound:
    """Bound on Pr(sample mean <= a): same form with the infimum over x <= a."""
    if n < 1:
        raise ValueError("n must be at least 1")
    lo = min(a, 1.0) * 1e-9
    _assert_convex_on(rate_fn, max(lo, a * 1e-6), a)
    inf = min(_golden_min(rate_fn, lo, a), rate_fn(a))
    return _tail(n, a, max(inf, 0.0), "lower")


def binary_divergence(alpha: float, mu: float) -> float:
    """D(alpha || mu) in bits, with 0 log 0 = 0 and +inf on disagreement at the edges."""
    if not (0 <= alpha <= 1 and 0 <= mu <= 1):
        raise ValueError("arguments must lie in [0, 1]")
    total = 0.0
    for x, y in ((alpha, mu), (1.0 - alpha, 1.0 - mu)):
        if x == 0.0:
            continue
        if y == 0.0:
            return math.inf
        total += x * math.log2(x / y)
    return total


def azuma_tail(n: int, t: float, cap: float = 1.0) -> TailBound:
    """Bounded-increment martingale tail exp(-n t^2 / (2 cap^2)).

    ``cap`` is the almost-sure bound on each increment; some applications
    feed increments bounded by 2, which is why it is a parameter.
    """
    if n < 1 or t < 0 or cap <= 0:
        raise ValueError("need n >= 1, t >= 0, cap > 0")
    rate = t * t / (2.0 * cap * cap)
    return _tail(n, t, rate, "upper")


def entropy_divergence_exponent(epsilon: float, d: int, c2: float = ENTROPY_CONCENTRATION_CONSTANT_LOWER) -> float:
    """Per-basis exponent epsilon*d*c2 / (2 log2(d)^2) - 1 of the entropy
    concentration step.  Formula evaluator only; the constant is loose."""
    if d < 2 or epsilon <= 0:
        raise ValueError("need d >= 2 and epsilon > 0")
    return epsilon * d * c2 / (2.0 * math.log2(d) ** 2) - 1.0


@dataclass(frozen=True)
class TraceNormExperimentReport:
    """Trace-norm deviations of uniform Pauli-word mixtures from I/d."""

    d: int
    n: int
    ensemble_draws: int
    states_per_draw: int
    deviations: np.ndarray
    grand_mean: float
    std_error: float
    bound: float  # sqrt(d/n)
    within_bound: bool


def _trace_norm_deviation(rmap: RandomizingMap, psi: np.ndarray) -> float:
    d = rmap.dim
    m = apply_map_pure(rmap, psi) - np.eye(d) / d
    return float(np.abs(np.linalg.eigvalsh(m)).sum())


def pauli_trace_norm_experiment(
    d: int,
    n: int,
    ensemble_draws: int,
    states_per_draw: int,
    stream: SeededStream,
) -> TraceNormExperimentReport:
    """Monte Carlo check of E||mixture - I/d||_1 <= sqrt(d/n) for Pauli words."""
    if d & (d - 1):
        raise ValueError("d must be a power of two")
    if n < 1:
        raise ValueError("n must be positive")
    devs = []
    for draw in range(ensemble_draws):
        ens = build_ensemble(d, n, "pauli", stream.child(0, draw))
        rmap = RandomizingMap(ens)
        states = haar_pure_states(d, states_per_draw, stream.child(1, draw))
        for psi in states:
            devs.append(_trace_norm_deviation(rmap, psi))
    devs = np.array(devs)
    mean = float(devs.mean())
    se = float(devs.std(ddof=1) / np.sqrt(len(devs))) if len(devs) > 1 else 0.0
    bound = math.sqrt(d / n)
    return TraceNormExperimentReport(
        d=d,
        n=n,
        ensemble_draws=ensemble_draws,
        states_per_draw=states_per_draw,
        deviations=devs,
        grand_mean=mean,
        std_error=se,
        bound=bound,
        within_bound=mean <= bound + 3.0 * se,
    )


@dataclass(frozen=True)
class TraceNormScalingReport:
    """Empirical trace-norm deviations against the inverted size formula."""

    d: int
    n: int
    epsilon_theory: float  # sqrt(d log2 d / n)
    max_deviation: float
    median_deviation: float
    deviations: np.ndarray


def trace_norm_randomizing_check(
    d: int, n: int, states: int, stream: SeededStream
) -> TraceNormScalingReport:
    """Measure max/median trace-norm deviation of a Pauli-word mixture.

    ``epsilon_theory`` inverts n = d log2(d) / eps^2.  It comes from an
    existence statement with loose constants, so no assertion is made
    against it; the report simply carries both numbers.
    """
    ens = build_ensemble(d, n, "pauli", stream.child(0))
    rmap = RandomizingMap(ens)
    probe = haar_pure_states(d, states, stream.child(1))
    devs = np.array([_trace_norm_deviation(rmap, psi) for psi in probe])
    return TraceNormScalingReport(
        d=d,
        n=n,
        epsilon_theory=math.sqrt(d * math.log2(d) / n),
        max_deviation=float(devs.max()),
        median_deviation=float(np.median(devs)),
        deviations=devs,
    )
