"""Almost-supermartingale drift monitoring, convergence verdicts and exact
small-instance oracles for the urn engine.

With Z_n = ||p_n - q0||^2 and xi_n = (k_{n+1} - k_n) / k_{n+1}^2 the drift
bound E[Z_{n+1} | F_n] <= Z_n + xi_n holds whenever q0 is contracting. Exact
checks use rational arithmetic throughout.
"""
import collections
import dataclasses
import fractions
import logging
import math

import numpy as np

from urns import const
from urns import engine
from urns import errors
from urns import simplex
from urns import types
from urns import util

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class DriftRecord:
    n: int
    total: int
    next_total: int
    z: fractions.Fraction
    xi: fractions.Fraction
    expected_next: fractions.Fraction
    drift: fractions.Fraction
    zeta: fractions.Fraction
    method: types.DriftMethod
    std_error: float = None

    @property
    def exact(self):
        return self.method != types.DriftMethod.MONTE_CARLO

    @property
    def violation(self):
        # Only exact drifts can violate the bound
        return self.exact and self.drift > self.xi

    def to_row(self):
        return {
            "n": self.n,
            "k": self.total,
            "next_k": self.next_total,
            "z": float(self.z),
            "xi": float(self.xi),
            "expected_next": float(self.expected_next),
            "drift": float(self.drift),
            "zeta": float(self.zeta),
            "std_error": self.std_error,
            "method": self.method.value,
            "violation": self.violation,
        }


def _q0_exact(q0):
    if isinstance(q0, simplex.Distribution):
        return q0.exact()
    return [fractions.Fraction(x) for x in q0]


def _squared_distance(a, b):
    return sum((x - y) ** 2 for x, y in zip(a, b))


def _batch_size(state, next_total):
    m = next_total - state.total
    if m < 1:
        raise errors.NonIncreasingSchedule(f"Next population {next_total} must exceed {state.total}")
    return m


def _record(state, next_total, z, expected_next, method, std_error=None):
    m = next_total - state.total
    xi = fractions.Fraction(m, next_total**2)
    return DriftRecord(
        n=state.step,
        total=state.total,
        next_total=next_total,
        z=z,
        xi=xi,
        expected_next=expected_next,
        drift=expected_next - z,
        zeta=max(fractions.Fraction(0), z + xi - expected_next),
        method=method,
        std_error=std_error,
    )


def exact_conditional_drift(state, simplex_map, next_total, q0, outcome_cap=const.DEFAULT_OUTCOME_CAP):
    m = _batch_size(state, next_total)
    size = simplex_map.size
    outcomes = util.composition_count(m, size)
    if outcomes > outcome_cap:
        raise errors.TooManyOutcomes(f"Batch of {m} over {size} labels has {outcomes} outcomes > cap {outcome_cap}")

    q = _q0_exact(q0)
    p = state.exact_p()
    mapped = simplex_map.apply_exact(p)
    counts = [int(c) for c in state.counts]

    expected_next = fractions.Fraction(0)
    for batch in util.compositions(m, size):
        probability = fractions.Fraction(util.multinomial_coefficient(batch))
        for t, b in zip(mapped, batch):
            if b:
                probability *= t**b
        if not probability:
            continue
        after = [fractions.Fraction(c + b, next_total) for c, b in zip(counts, batch)]
        expected_next += probability * _squared_distance(after, q)

    return _record(state, next_total, _squared_distance(p, q), expected_next, types.DriftMethod.ENUMERATION)


def analytic_conditional_drift(state, simplex_map, next_total, q0):
    # E||p' - q||^2 = ||(1 - pi)(p - q) + pi (T(p) - q)||^2 + pi^2 (1 - ||T(p)||^2) / m
    m = _batch_size(state, next_total)
    q = _q0_exact(q0)
    p = state.exact_p()
    mapped = simplex_map.apply_exact(p)
    pi = fractions.Fraction(m, next_total)

    mean = [(1 - pi) * (a - c) + pi * (t - c) for a, t, c in zip(p, mapped, q)]
    variance = pi**2 * (1 - sum(t * t for t in mapped)) / m
    expected_next = sum(x * x for x in mean) + variance
    return _record(state, next_total, _squared_distance(p, q), expected_next, types.DriftMethod.ANALYTIC)


def conditional_drift(state, simplex_map, next_total, q0, outcome_cap=const.DEFAULT_OUTCOME_CAP):
    m = next_total - state.total
    if util.composition_count(m, simplex_map.size) <= outcome_cap:
        return exact_conditional_drift(state, simplex_map, next_total, q0, outcome_cap=outcome_cap)
    return analytic_conditional_drift(state, simplex_map, next_total, q0)


def replicate_generators(seed, chunks):
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(chunks)]


def monte_carlo_drift(state, simplex_map, next_total, q0, replicates, seed=0, chunks=1):
    if replicates < const.MIN_DRIFT_REPLICATES:
        raise errors.InputError(f"Monte Carlo drift needs >= {const.MIN_DRIFT_REPLICATES} replicates, got {replicates}")
    m = _batch_size(state, next_total)
    q = q0.weights if isinstance(q0, simplex.Distribution) else np.asarray(q0, dtype=float)
    mapped = simplex_map.apply_weights(state.p)

    sizes = [len(part) for part in np.array_split(np.arange(replicates), chunks) if len(part)]
    batches = np.concatenate(
        [rng.multinomial(m, mapped, size=size) for rng, size in zip(replicate_generators(seed, len(sizes)), sizes)]
    )
    values = (((state.counts + batches) / next_total - q) ** 2).sum(axis=1)
    z = float(((state.p - q) ** 2).sum())
    mean = float(values.mean())
    std_error = float(values.std(ddof=1) / math.sqrt(replicates))

    record = _record(
        state,
        next_total,
        fractions.Fraction(z),
        fractions.Fraction(mean),
        types.DriftMethod.MONTE_CARLO,
        std_error=std_error,
    )
    logger.debug("Monte Carlo drift %s +- %s over %s replicates", float(record.drift), std_error, replicates)
    return record


def boundary_escape(snapshot, c):
    # 1 / <c_j, p_n>, infinite once the urn sits on the boundary
    mass = fractions.Fraction(sum(int(x) for x, ci in zip(snapshot.counts, c) if ci), snapshot.total)
    return math.inf if mass == 0 else float(1 / mass)


def expected_boundary_escape(state, simplex_map, next_total, c):
    # E[k_{n+1} / (k_n <c, p_n> + S)], S ~ Binomial(m, <c, T(p_n)>)
    m = _batch_size(state, next_total)
    escaped = sum(int(x) for x, ci in zip(state.counts, c) if ci)
    rate = sum(t for t, ci in zip(simplex_map.apply_exact(state.exact_p()), c) if ci)
    expected = fractions.Fraction(0)
    for s in range(m + 1):
        probability = math.comb(m, s) * rate**s * (1 - rate) ** (m - s)
        if not probability:
            continue
        if escaped + s == 0:
            return math.inf
        expected += probability * fractions.Fraction(next_total, escaped + s)
    return float(expected)


@dataclasses.dataclass
class MonitorReport:
    records: list
    z_series: list
    xi_partial_sums: list
    xi_bound: float
    boundary_series: dict
    boundary_expectations: dict

    @property
    def violations(self):
        return [r for r in self.records if r.violation]

    def summary(self):
        return {
            "monitored_steps": len(self.records),
            "violations": len(self.violations),
            "xi_sum": self.xi_partial_sums[-1][1] if self.xi_partial_sums else 0.0,
            "xi_bound": self.xi_bound,
            "max_z": max((z for _, z in self.z_series), default=0.0),
            "final_z": self.z_series[-1][1] if self.z_series else None,
        }


def _checkpoints(snapshots, window, count):
    late = [s.n for s in snapshots if s.n >= window]
    if not late or count <= 0:
        return set()
    targets = np.geomspace(max(window, 1), max(late[-1], 1), num=count)
    chosen = set()
    for target in targets:
        chosen.add(min(late, key=lambda n: abs(n - target)))
    return chosen


def state_at(snapshot):
    # Drift only needs the counts, the generator is never drawn from
    return engine.UrnState(np.array(snapshot.counts, dtype=np.int64), snapshot.total, snapshot.n, None)


def robbins_siegmund_monitor(
    trajectory,
    simplex_map,
    schedule,
    q0,
    window=const.DEFAULT_MONITOR_WINDOW,
    checkpoints=const.DEFAULT_MONITOR_CHECKPOINTS,
    outcome_cap=const.DEFAULT_MONITOR_OUTCOME_CAP,
    boundary_vectors=None,
):
    snapshots = trajectory.snapshots
    if len(snapshots) < 2:
        raise errors.InputError(f"Monitor needs at least 2 snapshots, got {len(snapshots)}")
    q = q0.weights if isinstance(q0, simplex.Distribution) else np.asarray(q0, dtype=float)

    late = _checkpoints(snapshots, window, checkpoints)
    boundary_vectors = boundary_vectors or {}
    records, boundary_expectations = [], {j: [] for j in boundary_vectors}
    for snapshot in snapshots:
        if snapshot.n >= trajectory.steps or not (snapshot.n < window or snapshot.n in late):
            continue
        state = state_at(snapshot)
        next_total = schedule.next_total(snapshot.n, snapshot.total)
        record = conditional_drift(state, simplex_map, next_total, q0, outcome_cap=outcome_cap)
        if record.violation:
            logger.warning(
                "Drift bound violated at n = %s: %s > %s",
                snapshot.n,
                float(record.drift),
                float(record.xi),
            )
        records.append(record)
        if _batch_size(state, next_total) + 1 <= outcome_cap:
            for j, c in boundary_vectors.items():
                boundary_expectations[j].append((snapshot.n, expected_boundary_escape(state, simplex_map, next_total, c)))

    z_series = [(s.n, float(((s.p - q) ** 2).sum())) for s in snapshots]

    partial, total, xi_partial_sums = 0.0, schedule.k0, []
    for n in range(trajectory.steps):
        next_total = schedule.next_total(n, total)
        partial += (next_total - total) / next_total**2
        total = next_total
        xi_partial_sums.append((n, partial))

    boundary_series = {}
    for j, c in boundary_vectors.items():
        boundary_series[j] = [(s.n, boundary_escape(s, c)) for s in snapshots]

    report = MonitorReport(records, z_series, xi_partial_sums, 1.0 / schedule.k0, boundary_series, boundary_expectations)
    logger.info("Monitored %s drift checkpoints, %s violations", len(records), len(report.violations))
    return report


@dataclasses.dataclass
class ConvergenceVerdict:
    target: simplex.Distribution
    threshold: float
    final_distance: float
    final_total_variation: float
    window_max_distance: float
    converged: bool
    estimated_limit: simplex.Distribution

    def to_dict(self):
        return {
            "target": self.target.to_list(),
            "threshold": self.threshold,
            "final_distance": self.final_distance,
            "final_total_variation": self.final_total_variation,
            "window_max_distance": self.window_max_distance,
            "converged": self.converged,
            "estimated_limit": self.estimated_limit.to_list(),
        }


def convergence_verdict(
    trajectory,
    target,
    threshold=const.DEFAULT_CONVERGENCE_THRESHOLD,
    window=const.DEFAULT_VERDICT_WINDOW,
):
    if window < 1 or len(trajectory.snapshots) < window:
        raise errors.InputError(f"Verdict window {window} needs at least that many snapshots")
    target = target if isinstance(target, simplex.Distribution) else simplex.Distribution(target)
    recent = np.array([s.p for s in trajectory.snapshots[-window:]])
    distances = np.linalg.norm(recent - target.weights, axis=1)
    limit = recent.mean(axis=0)

    verdict = ConvergenceVerdict(
        target=target,
        threshold=threshold,
        final_distance=float(distances[-1]),
        final_total_variation=util.total_variation(recent[-1], target.weights),
        window_max_distance=float(distances.max()),
        converged=bool(distances.max() <= threshold),
        estimated_limit=simplex.Distribution(limit / limit.sum()),
    )
    logger.info(
        "Seed %s %s, window max distance %s",
        trajectory.seed,
        "converged" if verdict.converged else "did not converge",
        verdict.window_max_distance,
    )
    return verdict


def exact_distribution(initial_counts, simplex_map, schedule, steps, cap=const.DEFAULT_DISTRIBUTION_CAP):
    if steps < 0:
        raise errors.InputError(f"Steps must be non-negative, got {steps}")
    size = simplex_map.size
    initial = tuple(int(c) for c in initial_counts)
    if len(initial) != size:
        raise errors.InputError(f"Expected {size} initial counts, got {len(initial)}")
    law = {initial: fractions.Fraction(1)}
    total = sum(initial)

    enumerated = 0
    for n in range(steps):
        next_total = schedule.next_total(n, total)
        m = next_total - total
        enumerated += len(law) * util.composition_count(m, size)
        if enumerated > cap:
            raise errors.TooManyOutcomes(f"Exact law after {n + 1} steps needs > {cap} outcomes")

        batches = list(util.compositions(m, size))
        coefficients = [util.multinomial_coefficient(b) for b in batches]
        following = collections.defaultdict(fractions.Fraction)
        for counts, weight in law.items():
            mapped = simplex_map.apply_exact([fractions.Fraction(c, total) for c in counts])
            for batch, coefficient in zip(batches, coefficients):
                probability = weight * coefficient
                for t, b in zip(mapped, batch):
                    if b:
                        probability *= t**b
                if probability:
                    following[tuple(c + b for c, b in zip(counts, batch))] += probability
        law, total = dict(following), next_total

    return sorted(law.items())


@dataclasses.dataclass
class OracleComparison:
    counts: tuple
    probability: fractions.Fraction
    frequency: float
    sigma: float

    @property
    def within(self):
        return abs(self.frequency - float(self.probability)) <= const.SIGMA_BAND * self.sigma

    def to_dict(self):
        return {
            "counts": list(self.counts),
            "probability": float(self.probability),
            "frequency": self.frequency,
            "sigma": self.sigma,
            "within": self.within,
        }


def oracle_check(initial_counts, simplex_map, schedule, steps, runs, seed=0, cap=const.DEFAULT_DISTRIBUTION_CAP):
    law = exact_distribution(initial_counts, simplex_map, schedule, steps, cap=cap)
    rng = np.random.default_rng(seed)
    observed = collections.Counter()
    for _ in range(runs):
        state = engine.initial_state(initial_counts, rng)
        for _ in range(steps):
            state = engine.step(state, simplex_map, schedule)
        observed[tuple(int(c) for c in state.counts)] += 1

    unexpected = set(observed) - {counts for counts, _ in law}
    if unexpected:
        logger.warning("Engine reached %s states outside the exact support", len(unexpected))

    comparisons = []
    for counts, probability in law:
        p = float(probability)
        comparisons.append(
            OracleComparison(counts, probability, observed[counts] / runs, math.sqrt(p * (1 - p) / runs))
        )
    return comparisons
