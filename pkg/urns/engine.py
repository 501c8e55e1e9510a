"""The urn recursion.

The state is a vector of integer ball counts; the empirical distribution p_n
is always derived from it. Each step grows the urn from k_n to k_{n+1} balls
by adding a Multinomial(k_{n+1} - k_n, T(p_n)) batch of labels.

Reproducibility: one numpy PCG64 generator per trajectory, seeded with the
trajectory's seed, and one Generator.multinomial call per step. Identical
seed and configuration give bit-identical trajectories on one numpy build.
"""
import dataclasses
import fractions
import logging
import math
import multiprocessing
import time

import numpy as np

from urns import const
from urns import errors
from urns import simplex
from urns import types

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class GrowthSchedule:
    kind: types.ScheduleKind
    k0: int
    ratio: float = None
    values: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "kind", types.ScheduleKind(self.kind))
        if int(self.k0) != self.k0 or self.k0 < 1:
            raise errors.InputError(f"Initial population k0 must be a positive integer, got {self.k0}")
        if self.kind == types.ScheduleKind.GEOMETRIC and (self.ratio is None or self.ratio <= 1):
            raise errors.InputError(f"Geometric schedule needs ratio > 1, got {self.ratio}")
        if self.kind == types.ScheduleKind.EXPLICIT:
            if not self.values:
                raise errors.InputError("Explicit schedule needs a list of population sizes")
            values = tuple(int(v) for v in self.values)
            if values[0] != self.k0:
                raise errors.InputError(f"Explicit schedule starts at {values[0]}, expected k0 = {self.k0}")
            for n, (a, b) in enumerate(zip(values, values[1:])):
                if b < a + 1:
                    raise errors.NonIncreasingSchedule(f"k_{n + 1} = {b} < k_{n} + 1 = {a + 1}")
            object.__setattr__(self, "values", values)

    @classmethod
    def unit(cls, k0):
        return cls(types.ScheduleKind.UNIT, k0)

    @classmethod
    def geometric(cls, k0, ratio):
        return cls(types.ScheduleKind.GEOMETRIC, k0, ratio=ratio)

    @classmethod
    def explicit(cls, values):
        values = tuple(values)
        return cls(types.ScheduleKind.EXPLICIT, values[0] if values else 1, values=values)

    def next_total(self, step, total):
        if self.kind == types.ScheduleKind.UNIT:
            return total + 1
        elif self.kind == types.ScheduleKind.GEOMETRIC:
            # Decimal ratio so that e.g. 1.05 * 100 is exactly 105
            ratio = fractions.Fraction(str(self.ratio))
            return max(total + 1, math.ceil(ratio * total))

        if step + 1 >= len(self.values):
            raise errors.ScheduleExhausted(f"Explicit schedule has no k_{step + 1}")
        result = self.values[step + 1]
        if result < total + 1:
            raise errors.NonIncreasingSchedule(f"k_{step + 1} = {result} < k_{step} + 1 = {total + 1}")
        return result

    def sequence(self, horizon):
        totals = [self.k0]
        for n in range(horizon):
            totals.append(self.next_total(n, totals[-1]))
        return totals

    def descriptor(self):
        result = {"kind": self.kind.value, "k0": self.k0}
        if self.ratio is not None:
            result["ratio"] = self.ratio
        if self.values is not None:
            result["values"] = list(self.values)
        return result


@dataclasses.dataclass(frozen=True, eq=False)
class UrnState:
    counts: np.ndarray
    total: int
    step: int
    # Owned by the trajectory and advanced by every batch
    rng: np.random.Generator

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or np.any(counts < 0):
            raise errors.InputError(f"Counts must be a non-negative vector, got {counts.tolist()}")
        if int(counts.sum()) != self.total:
            raise errors.InputError(f"Counts sum to {int(counts.sum())}, not total {self.total}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def p(self):
        return self.counts / self.total

    def distribution(self):
        return simplex.Distribution.from_counts(self.counts.tolist())

    def exact_p(self):
        return [fractions.Fraction(int(c), self.total) for c in self.counts]


def initial_state(counts, rng):
    counts = [int(c) for c in counts]
    if sum(counts) < 1:
        raise errors.InputError(f"Initial urn must hold at least one ball, got {counts}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return UrnState(np.array(counts, dtype=np.int64), sum(counts), 0, rng)


def _draw(rng, simplex_map, counts, total, m):
    return rng.multinomial(m, simplex_map.apply_weights(counts / total))


def sample_batch(state, simplex_map, m):
    if m < 1:
        raise errors.InputError(f"Batch size must be >= 1, got {m}")
    return _draw(state.rng, simplex_map, state.counts, state.total, m)


def step(state, simplex_map, schedule):
    next_total = schedule.next_total(state.step, state.total)
    batch = sample_batch(state, simplex_map, next_total - state.total)
    return UrnState(state.counts + batch, next_total, state.step + 1, state.rng)


@dataclasses.dataclass(frozen=True)
class StopRule:
    max_steps: int = None
    max_total: int = None

    def __post_init__(self):
        if self.max_steps is None and self.max_total is None:
            raise errors.InputError("Stop rule needs max_steps or max_total")
        for name in ("max_steps", "max_total"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise errors.InputError(f"Stop rule {name} must be non-negative, got {value}")

    def done(self, state):
        return self.reached(state.step, state.total)

    def reached(self, step, total):
        if self.max_steps is not None and step >= self.max_steps:
            return True
        return self.max_total is not None and total >= self.max_total


@dataclasses.dataclass(frozen=True)
class RunConfig:
    simplex_map: simplex.SimplexMap
    schedule: GrowthSchedule
    initial_counts: tuple
    stop: StopRule
    stride: int = 1
    seed: int = 0

    def __post_init__(self):
        counts = tuple(int(c) for c in self.initial_counts)
        object.__setattr__(self, "initial_counts", counts)
        if len(counts) != self.simplex_map.size:
            raise errors.InputError(f"Expected {self.simplex_map.size} initial counts, got {len(counts)}")
        if sum(counts) != self.schedule.k0:
            raise errors.InputError(f"Initial counts sum to {sum(counts)}, schedule starts at k0 = {self.schedule.k0}")
        if self.stride < 1:
            raise errors.InputError(f"Snapshot stride must be >= 1, got {self.stride}")


@dataclasses.dataclass(frozen=True)
class Snapshot:
    n: int
    total: int
    counts: tuple

    @property
    def p(self):
        return np.array(self.counts, dtype=float) / self.total


@dataclasses.dataclass(eq=False)
class Trajectory:
    seed: int
    schedule: dict
    simplex_map: dict
    labels: tuple
    snapshots: list
    terminal: UrnState = None
    config_digest: str = None

    @property
    def last(self):
        return self.snapshots[-1]

    @property
    def steps(self):
        return self.last.n

    def summary(self):
        return {
            "seed": self.seed,
            "terminal_p": self.last.p.tolist(),
            "terminal_k": self.last.total,
            "steps": self.steps,
        }


def check_consistent(trajectory, schedule):
    """Raise InputError unless the snapshots follow `schedule` and never lose balls."""
    snapshots = trajectory.snapshots
    if snapshots[0].n == 0 and snapshots[0].total != schedule.k0:
        raise errors.InputError(f"Trajectory starts at k = {snapshots[0].total}, the schedule starts at k0 = {schedule.k0}")
    for a, b in zip(snapshots, snapshots[1:]):
        if b.n <= a.n:
            raise errors.InputError(f"Snapshot steps must increase, got n = {a.n} then n = {b.n}")
        total = a.total
        try:
            for n in range(a.n, b.n):
                total = schedule.next_total(n, total)
        except errors.ScheduleExhausted as e:
            raise errors.InputError(f"Trajectory runs past the schedule: {e}")
        if total != b.total:
            raise errors.InputError(f"Snapshot n = {b.n} has k = {b.total}, the schedule gives k = {total}")
        if any(y < x for x, y in zip(a.counts, b.counts)):
            raise errors.InputError(f"Snapshot n = {b.n} has fewer balls of some label than n = {a.n}")


def _snapshot(state):
    return Snapshot(state.step, state.total, tuple(int(c) for c in state.counts))


def run(config):
    # Same draws as repeated `step` calls without rebuilding a validated state per step
    state = initial_state(config.initial_counts, config.seed)
    counts, total, n = state.counts.copy(), state.total, 0
    snapshots = [_snapshot(state)]
    started = time.perf_counter()
    while not config.stop.reached(n, total):
        next_total = config.schedule.next_total(n, total)
        counts += _draw(state.rng, config.simplex_map, counts, total, next_total - total)
        total, n = next_total, n + 1
        if n % config.stride == 0:
            snapshots.append(Snapshot(n, total, tuple(counts.tolist())))
    state = UrnState(counts, total, n, state.rng)
    if snapshots[-1].n != state.step:
        snapshots.append(_snapshot(state))

    logger.info(
        "Finished seed %s after %s steps with k = %s in %.1fs",
        config.seed,
        state.step,
        state.total,
        time.perf_counter() - started,
    )
    return Trajectory(
        seed=config.seed,
        schedule=config.schedule.descriptor(),
        simplex_map=config.simplex_map.descriptor(),
        labels=tuple(config.simplex_map.labels),
        snapshots=snapshots,
        terminal=state,
    )


def run_sweep(config, seeds, workers=1):
    seeds = list(seeds)
    if not seeds:
        raise errors.InputError("Sweep needs at least one seed")
    configs = [dataclasses.replace(config, seed=seed) for seed in seeds]
    logger.info("Running %s trajectories with %s workers", len(configs), workers)

    if workers > 1:
        with multiprocessing.Pool(min(workers, len(configs))) as pool:
            return pool.map(run, configs)
    return [run(c) for c in configs]


def generator_counts(labels, generators):
    # One ball per generating element
    counts = [0] * len(labels)
    for generator in generators:
        if generator not in labels:
            raise errors.UnknownElement(f"Generator {generator!r} is not one of {list(labels)}")
        counts[labels.index(generator)] += 1
    return counts


def describe_sampler():
    return {"rng": const.RNG_NAME, "sampler": const.SAMPLER_NAME, "numpy": np.__version__}
