"""Experiment configuration.

One YAML file describes the map, the initial urn, the growth schedule, the
stop rule, seeds, output and the parameters of every checker. Every field is
validated on load, before anything is built.
"""
import dataclasses
import logging
import pathlib

import numpy as np
import yaml

from urns import const
from urns import engine
from urns import errors
from urns import groups
from urns import simplex
from urns import tables
from urns import types
from urns import util

logger = logging.getLogger(__name__)


def _check_keys(cls, data, where):
    if not isinstance(data, dict):
        raise errors.ConfigError(f"{where} must be a mapping, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise errors.ConfigError(f"Unknown keys in {where}: {', '.join(unknown)}")


def _integer(value, where, minimum=None, optional=False):
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise errors.ConfigError(f"{where} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise errors.ConfigError(f"{where} must be >= {minimum}, got {value}")
    return value


def _number(value, where, optional=False):
    if value is None and optional:
        return None
    # YAML 1.1 reads "1e-3" as a string
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise errors.ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _positive(value, where, optional=False):
    value = _number(value, where, optional=optional)
    if value is not None and value <= 0:
        raise errors.ConfigError(f"{where} must be positive, got {value}")
    return value


def _sequence(value, where, item, optional=True):
    if value is None and optional:
        return None
    if not isinstance(value, (list, tuple)):
        raise errors.ConfigError(f"{where} must be a list, got {value!r}")
    return tuple(item(v, f"{where}[{i}]") for i, v in enumerate(value))


def _label(value, where):
    if not isinstance(value, (str, int)):
        raise errors.ConfigError(f"{where} must be an element label, got {value!r}")
    return str(value)


@dataclasses.dataclass(frozen=True)
class GroupSpec:
    family: str = None
    n: int = None
    factors: tuple = None
    table: str = None

    @classmethod
    def from_dict(cls, data, where="map.group"):
        _check_keys(cls, data, where)
        table = data.get("table")
        family = data.get("family")
        if (table is None) == (family is None):
            raise errors.ConfigError(f"{where} needs exactly one of 'family' or 'table'")
        if table is not None:
            if not isinstance(table, str):
                raise errors.ConfigError(f"{where}.table must be a name or path, got {table!r}")
            return cls(table=table)

        try:
            family = types.GroupFamily(family).value
        except ValueError:
            choices = ", ".join(f.value for f in types.GroupFamily)
            raise errors.ConfigError(f"{where}.family must be one of {choices}, got {family!r}")
        if family == types.GroupFamily.DIRECT_PRODUCT.value:
            factors = data.get("factors")
            if not isinstance(factors, list) or len(factors) != 2:
                raise errors.ConfigError(f"{where}.factors must list exactly two groups")
            return cls(
                family=family,
                factors=tuple(cls.from_dict(f, f"{where}.factors[{i}]") for i, f in enumerate(factors)),
            )
        minimum = 3 if family == types.GroupFamily.DIHEDRAL.value else 1
        return cls(family=family, n=_integer(data.get("n"), f"{where}.n", minimum=minimum))

    def to_dict(self):
        if self.table is not None:
            return {"table": self.table}
        if self.factors is not None:
            return {"family": self.family, "factors": [f.to_dict() for f in self.factors]}
        return {"family": self.family, "n": self.n}

    def build(self, cap=const.DEFAULT_SYMMETRIC_CAP):
        if self.table is not None:
            return groups.load_cayley_table(tables.resolve(self.table))
        if self.factors is not None:
            return groups.builtin_group(self.family, factors=[f.build(cap=cap) for f in self.factors], cap=cap)
        return groups.builtin_group(self.family, n=self.n, cap=cap)


@dataclasses.dataclass(frozen=True)
class MapSpec:
    kind: str = types.MapKind.CONVOLUTION.value
    group: GroupSpec = GroupSpec(family=types.GroupFamily.CYCLIC.value, n=2)
    k: int = None
    s: float = None
    t: float = None

    @classmethod
    def from_dict(cls, data, where="map"):
        _check_keys(cls, data, where)
        try:
            kind = types.MapKind(data.get("kind", cls.kind))
        except ValueError:
            choices = ", ".join(k.value for k in types.MapKind)
            raise errors.ConfigError(f"{where}.kind must be one of {choices}, got {data.get('kind')!r}")

        if kind == types.MapKind.CONVOLUTION:
            group = GroupSpec.from_dict(data.get("group", cls.group.to_dict()), f"{where}.group")
            return cls(kind=kind.value, group=group)
        elif kind == types.MapKind.PARITY:
            return cls(kind=kind.value, group=None, k=_integer(data.get("k"), f"{where}.k", minimum=1))

        s = _number(data.get("s"), f"{where}.s")
        t = _number(data.get("t"), f"{where}.t")
        if s >= 1 or t >= 1:
            raise errors.InvalidFitness(f"{where} needs s < 1 and t < 1, got s={s}, t={t}")
        return cls(kind=kind.value, group=None, s=s, t=t)

    def to_dict(self):
        result = {"kind": self.kind}
        if self.group is not None:
            result["group"] = self.group.to_dict()
        for name in ("k", "s", "t"):
            if getattr(self, name) is not None:
                result[name] = getattr(self, name)
        return result

    def build(self, limits):
        kind = types.MapKind(self.kind)
        if kind == types.MapKind.CONVOLUTION:
            return simplex.convolution_map(self.group.build(cap=limits.symmetric_cap))
        elif kind == types.MapKind.PARITY:
            return simplex.parity_map(self.k)
        return simplex.genotype_map(self.s, self.t)


@dataclasses.dataclass(frozen=True)
class InitialSpec:
    counts: tuple = None
    generators: tuple = None
    p0: tuple = None
    k0: int = None

    @classmethod
    def from_dict(cls, data, where="initial"):
        _check_keys(cls, data, where)
        spec = cls(
            counts=_sequence(data.get("counts"), f"{where}.counts", lambda v, w: _integer(v, w, minimum=0)),
            generators=_sequence(data.get("generators"), f"{where}.generators", _label),
            p0=_sequence(data.get("p0"), f"{where}.p0", _number),
            k0=_integer(data.get("k0"), f"{where}.k0", minimum=1, optional=True),
        )
        given = [spec.counts is not None, spec.generators is not None, spec.p0 is not None]
        if sum(given) != 1:
            raise errors.ConfigError(f"{where} needs exactly one of 'counts', 'generators' or 'p0'")
        if (spec.p0 is None) != (spec.k0 is None):
            raise errors.ConfigError(f"{where}.p0 and {where}.k0 go together")
        if spec.counts is not None and sum(spec.counts) < 1:
            raise errors.ConfigError(f"{where}.counts must hold at least one ball")
        if spec.generators is not None and not spec.generators:
            raise errors.ConfigError(f"{where}.generators must not be empty")
        return spec

    def to_dict(self):
        return {
            name: list(value) if isinstance(value, tuple) else value
            for name, value in dataclasses.asdict(self).items()
            if value is not None
        }

    def build(self, labels):
        if self.generators is not None:
            return engine.generator_counts(list(labels), self.generators)
        if self.counts is not None:
            if len(self.counts) != len(labels):
                raise errors.ConfigError(f"initial.counts needs {len(labels)} entries, got {len(self.counts)}")
            return list(self.counts)

        if len(self.p0) != len(labels):
            raise errors.ConfigError(f"initial.p0 needs {len(labels)} entries, got {len(self.p0)}")
        p0 = simplex.Distribution(self.p0)
        counts = np.rint(p0.weights * self.k0).astype(int)
        if counts.sum() != self.k0 or np.abs(counts / self.k0 - p0.weights).max() > const.NORMALIZATION_TOLERANCE:
            raise errors.ConfigError(f"initial.p0 = {list(self.p0)} is not representable with k0 = {self.k0} balls")
        return counts.tolist()


@dataclasses.dataclass(frozen=True)
class ScheduleSpec:
    kind: str = types.ScheduleKind.UNIT.value
    ratio: float = None
    values: tuple = None

    @classmethod
    def from_dict(cls, data, where="schedule"):
        _check_keys(cls, data, where)
        try:
            kind = types.ScheduleKind(data.get("kind", cls.kind))
        except ValueError:
            choices = ", ".join(k.value for k in types.ScheduleKind)
            raise errors.ConfigError(f"{where}.kind must be one of {choices}, got {data.get('kind')!r}")
        spec = cls(
            kind=kind.value,
            ratio=_number(data.get("ratio"), f"{where}.ratio", optional=True),
            values=_sequence(data.get("values"), f"{where}.values", lambda v, w: _integer(v, w, minimum=1)),
        )
        if kind == types.ScheduleKind.GEOMETRIC and (spec.ratio is None or spec.ratio <= 1):
            raise errors.ConfigError(f"{where}.ratio must be > 1 for a geometric schedule")
        if kind == types.ScheduleKind.EXPLICIT and not spec.values:
            raise errors.ConfigError(f"{where}.values must list population sizes for an explicit schedule")
        if kind == types.ScheduleKind.EXPLICIT:
            for n, (a, b) in enumerate(zip(spec.values, spec.values[1:])):
                if b < a + 1:
                    raise errors.NonIncreasingSchedule(f"{where}.values: k_{n + 1} = {b} < k_{n} + 1 = {a + 1}")
        return spec

    def to_dict(self):
        result = {"kind": self.kind}
        if self.ratio is not None:
            result["ratio"] = self.ratio
        if self.values is not None:
            result["values"] = list(self.values)
        return result

    def build(self, k0):
        kind = types.ScheduleKind(self.kind)
        if kind == types.ScheduleKind.EXPLICIT:
            if self.values[0] != k0:
                raise errors.ConfigError(f"schedule.values starts at {self.values[0]}, initial urn holds {k0} balls")
            return engine.GrowthSchedule.explicit(self.values)
        return engine.GrowthSchedule(kind, k0, ratio=self.ratio)


@dataclasses.dataclass(frozen=True)
class StopSpec:
    max_steps: int = 1000
    max_total: int = None

    @classmethod
    def from_dict(cls, data, where="stop"):
        _check_keys(cls, data, where)
        spec = cls(
            max_steps=_integer(data.get("max_steps"), f"{where}.max_steps", minimum=0, optional=True),
            max_total=_integer(data.get("max_total"), f"{where}.max_total", minimum=1, optional=True),
        )
        if spec.max_steps is None and spec.max_total is None:
            raise errors.ConfigError(f"{where} needs max_steps or max_total")
        return spec

    def to_dict(self):
        return {"max_steps": self.max_steps, "max_total": self.max_total}

    def build(self):
        return engine.StopRule(max_steps=self.max_steps, max_total=self.max_total)


@dataclasses.dataclass(frozen=True)
class LimitsSpec:
    subgroup_cap: int = const.DEFAULT_SUBGROUP_CAP
    symmetric_cap: int = const.DEFAULT_SYMMETRIC_CAP
    outcome_cap: int = const.DEFAULT_OUTCOME_CAP
    monitor_outcome_cap: int = const.DEFAULT_MONITOR_OUTCOME_CAP
    distribution_cap: int = const.DEFAULT_DISTRIBUTION_CAP

    @classmethod
    def from_dict(cls, data, where="limits"):
        _check_keys(cls, data, where)
        defaults = cls()
        return cls(
            **{
                f.name: _integer(data.get(f.name, getattr(defaults, f.name)), f"{where}.{f.name}", minimum=1)
                for f in dataclasses.fields(cls)
            }
        )

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class CheckSpec:
    samples: int = const.DEFAULT_A1_SAMPLES
    exclusion_radius: float = const.DEFAULT_EXCLUSION_RADIUS
    radii: tuple = const.DEFAULT_A2_RADII
    samples_per_radius: int = const.DEFAULT_A2_SAMPLES_PER_RADIUS
    margin: float = const.DEFAULT_A2_MARGIN
    horizon: int = const.DEFAULT_A3_HORIZON
    from_step: int = 0
    q0: tuple = None
    seed: int = 0

    @classmethod
    def from_dict(cls, data, where="checks"):
        _check_keys(cls, data, where)
        d = cls()
        spec = cls(
            samples=_integer(data.get("samples", d.samples), f"{where}.samples", minimum=1),
            exclusion_radius=_number(data.get("exclusion_radius", d.exclusion_radius), f"{where}.exclusion_radius"),
            radii=_sequence(data.get("radii", list(d.radii)), f"{where}.radii", _positive, optional=False),
            samples_per_radius=_integer(
                data.get("samples_per_radius", d.samples_per_radius), f"{where}.samples_per_radius", minimum=1
            ),
            margin=_number(data.get("margin", d.margin), f"{where}.margin"),
            horizon=_integer(data.get("horizon", d.horizon), f"{where}.horizon", minimum=1),
            from_step=_integer(data.get("from_step", d.from_step), f"{where}.from_step", minimum=0),
            q0=_sequence(data.get("q0"), f"{where}.q0", _number),
            seed=_integer(data.get("seed", d.seed), f"{where}.seed", minimum=0),
        )
        if not spec.radii:
            raise errors.ConfigError(f"{where}.radii must not be empty")
        if spec.exclusion_radius < 0:
            raise errors.ConfigError(f"{where}.exclusion_radius must be non-negative")
        if spec.from_step >= spec.horizon:
            raise errors.ConfigError(f"{where}.from_step must be < {where}.horizon")
        return spec

    def to_dict(self):
        result = dataclasses.asdict(self)
        result["radii"] = list(self.radii)
        result["q0"] = list(self.q0) if self.q0 is not None else None
        return result


@dataclasses.dataclass(frozen=True)
class DiagnoseSpec:
    window: int = const.DEFAULT_MONITOR_WINDOW
    checkpoints: int = const.DEFAULT_MONITOR_CHECKPOINTS
    threshold: float = const.DEFAULT_CONVERGENCE_THRESHOLD
    verdict_window: int = const.DEFAULT_VERDICT_WINDOW
    target: tuple = None
    replicates: int = 0
    oracle_steps: int = 0
    oracle_runs: int = 10**5
    seed: int = 0

    @classmethod
    def from_dict(cls, data, where="diagnose"):
        _check_keys(cls, data, where)
        d = cls()
        spec = cls(
            window=_integer(data.get("window", d.window), f"{where}.window", minimum=0),
            checkpoints=_integer(data.get("checkpoints", d.checkpoints), f"{where}.checkpoints", minimum=0),
            threshold=_number(data.get("threshold", d.threshold), f"{where}.threshold"),
            verdict_window=_integer(data.get("verdict_window", d.verdict_window), f"{where}.verdict_window", minimum=1),
            target=_sequence(data.get("target"), f"{where}.target", _number),
            replicates=_integer(data.get("replicates", d.replicates), f"{where}.replicates", minimum=0),
            oracle_steps=_integer(data.get("oracle_steps", d.oracle_steps), f"{where}.oracle_steps", minimum=0),
            oracle_runs=_integer(data.get("oracle_runs", d.oracle_runs), f"{where}.oracle_runs", minimum=1),
            seed=_integer(data.get("seed", d.seed), f"{where}.seed", minimum=0),
        )
        if spec.threshold < 0:
            raise errors.ConfigError(f"{where}.threshold must be non-negative")
        if 0 < spec.replicates < const.MIN_DRIFT_REPLICATES:
            raise errors.ConfigError(f"{where}.replicates must be 0 or >= {const.MIN_DRIFT_REPLICATES}")
        return spec

    def to_dict(self):
        result = dataclasses.asdict(self)
        result["target"] = list(self.target) if self.target is not None else None
        return result


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    map: MapSpec = MapSpec()
    initial: InitialSpec = InitialSpec(counts=(1, 1))
    schedule: ScheduleSpec = ScheduleSpec()
    stop: StopSpec = StopSpec()
    seeds: tuple = (0,)
    stride: int = 1
    output: str = "out"
    workers: int = 1
    limits: LimitsSpec = LimitsSpec()
    checks: CheckSpec = CheckSpec()
    diagnose: DiagnoseSpec = DiagnoseSpec()

    @classmethod
    def from_dict(cls, data):
        data = {} if data is None else data
        _check_keys(cls, data, "config")
        d = cls()
        seeds = _sequence(data.get("seeds", list(d.seeds)), "seeds", lambda v, w: _integer(v, w, minimum=0))
        if not seeds:
            raise errors.ConfigError("seeds must not be empty")
        output = data.get("output", d.output)
        if not isinstance(output, str) or not output:
            raise errors.ConfigError(f"output must be a directory path, got {output!r}")
        return cls(
            map=MapSpec.from_dict(data.get("map", d.map.to_dict())),
            initial=InitialSpec.from_dict(data.get("initial", d.initial.to_dict())),
            schedule=ScheduleSpec.from_dict(data.get("schedule", d.schedule.to_dict())),
            stop=StopSpec.from_dict(data.get("stop", d.stop.to_dict())),
            seeds=seeds,
            stride=_integer(data.get("stride", d.stride), "stride", minimum=1),
            output=output,
            workers=_integer(data.get("workers", d.workers), "workers", minimum=1),
            limits=LimitsSpec.from_dict(data.get("limits", {})),
            checks=CheckSpec.from_dict(data.get("checks", {})),
            diagnose=DiagnoseSpec.from_dict(data.get("diagnose", {})),
        )

    def to_dict(self):
        return {
            "map": self.map.to_dict(),
            "initial": self.initial.to_dict(),
            "schedule": self.schedule.to_dict(),
            "stop": self.stop.to_dict(),
            "seeds": list(self.seeds),
            "stride": self.stride,
            "output": self.output,
            "workers": self.workers,
            "limits": self.limits.to_dict(),
            "checks": self.checks.to_dict(),
            "diagnose": self.diagnose.to_dict(),
        }

    def with_overrides(self, seeds=None, output=None, stride=None):
        changes = {}
        if seeds is not None:
            if not seeds:
                raise errors.ConfigError("seeds must not be empty")
            changes["seeds"] = tuple(seeds)
        if output is not None:
            changes["output"] = output
        if stride is not None:
            changes["stride"] = _integer(stride, "stride", minimum=1)
        return dataclasses.replace(self, **changes)


def loads(text):
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise errors.ConfigError(f"Config is not valid YAML: {e}")
    return ExperimentConfig.from_dict(data)


def load(fh):
    logger.info("Reading config %s", getattr(fh, "name", "<stream>"))
    return loads(fh.read())


def load_path(path):
    return loads(pathlib.Path(path).read_text())


def dumps(config):
    return yaml.safe_dump(config.to_dict(), sort_keys=False)


def from_args(args):
    config = load(args.config) if getattr(args, "config", None) is not None else ExperimentConfig()
    seeds = None
    try:
        if getattr(args, "seeds", None):
            seeds = util.parse_seeds(args.seeds)
        elif getattr(args, "seed_range", None):
            seeds = util.parse_seed_range(args.seed_range)
    except ValueError as e:
        raise errors.ConfigError(str(e))
    return config.with_overrides(
        seeds=seeds,
        output=getattr(args, "out", None),
        stride=getattr(args, "stride", None),
    )


@dataclasses.dataclass(eq=False)
class Experiment:
    """Built objects of a validated configuration."""

    config: ExperimentConfig
    simplex_map: simplex.SimplexMap
    initial_counts: list
    schedule: engine.GrowthSchedule
    stop: engine.StopRule

    @property
    def p0(self):
        return simplex.Distribution.from_counts(self.initial_counts)

    def run_config(self, seed=None):
        return engine.RunConfig(
            simplex_map=self.simplex_map,
            schedule=self.schedule,
            initial_counts=tuple(self.initial_counts),
            stop=self.stop,
            stride=self.config.stride,
            seed=self.config.seeds[0] if seed is None else seed,
        )

    def fixed_points(self):
        return simplex.find_fixed_points(self.simplex_map, subgroup_cap=self.config.limits.subgroup_cap)


def build(config):
    simplex_map = config.map.build(config.limits)
    initial_counts = config.initial.build(simplex_map.labels)
    if config.initial.generators is not None and simplex_map.kind == types.MapKind.CONVOLUTION:
        seeds = [simplex_map.labels.index(g) for g in config.initial.generators]
        if not groups.generates_group(simplex_map.group, seeds):
            logger.warning("Generators %s do not generate %s", list(config.initial.generators), simplex_map.group.name)
    schedule = config.schedule.build(sum(initial_counts))
    return Experiment(config, simplex_map, initial_counts, schedule, config.stop.build())


def digest(config):
    # Only what shapes a trajectory file
    data = config.to_dict()
    for key in ("seeds", "output", "workers", "limits", "checks", "diagnose"):
        data.pop(key)
    return util.digest(data)
