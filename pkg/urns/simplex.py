"""Points of the probability simplex over a finite label set, and maps of the
simplex into itself.

Every map works on float vectors (batched over leading axes) for simulation
and on lists of Fractions for the exact oracles.
"""
import abc
import dataclasses
import fractions
import logging

import numpy as np

from urns import const
from urns import errors
from urns import groups
from urns import types

logger = logging.getLogger(__name__)

BINARY_PARITY_LABELS = ("0", "1")
BINARY_ALLELE_LABELS = ("A", "a")


@dataclasses.dataclass(frozen=True, eq=False)
class Distribution:
    weights: np.ndarray
    counts: tuple = None

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise errors.InvalidDistribution(f"Weights must be a non-empty vector, got shape {weights.shape}")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise errors.InvalidDistribution(f"Weights must be finite and non-negative: {weights.tolist()}")
        if abs(weights.sum() - 1.0) > const.NORMALIZATION_TOLERANCE:
            raise errors.InvalidDistribution(f"Weights sum to {weights.sum()!r}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_counts(cls, counts):
        counts = tuple(int(c) for c in counts)
        total = sum(counts)
        if total <= 0 or any(c < 0 for c in counts):
            raise errors.InvalidDistribution(f"Counts must be non-negative with a positive total: {counts}")
        return cls(np.array(counts, dtype=float) / total, counts=counts)

    @classmethod
    def uniform(cls, size):
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size, index):
        weights = np.zeros(size)
        weights[index] = 1.0
        return cls(weights)

    @classmethod
    def uniform_on(cls, mask):
        mask = np.asarray(mask, dtype=bool)
        return cls(mask / mask.sum())

    @classmethod
    def binary(cls, p):
        # Weight p on the first label, 1 - p on the second
        return cls(np.array([p, 1.0 - p]))

    @property
    def size(self):
        return self.weights.size

    @property
    def total(self):
        return sum(self.counts) if self.counts is not None else None

    @property
    def support(self):
        return self.weights > 0

    def exact(self):
        if self.counts is not None:
            total = self.total
            return [fractions.Fraction(c, total) for c in self.counts]
        return [fractions.Fraction(float(w)) for w in self.weights]

    def distance(self, other):
        return float(np.linalg.norm(self.weights - _weights(other)))

    def sup_distance(self, other):
        return float(np.max(np.abs(self.weights - _weights(other))))

    def total_variation(self, other):
        return 0.5 * float(np.abs(self.weights - _weights(other)).sum())

    def to_list(self):
        return self.weights.tolist()

    def __repr__(self):
        return f"Distribution({self.weights.tolist()})"


def _weights(value):
    return value.weights if isinstance(value, Distribution) else np.asarray(value, dtype=float)


class SimplexMap(abc.ABC):
    kind = None
    labels = ()

    @property
    def size(self):
        return len(self.labels)

    def apply(self, distribution):
        return Distribution(self.apply_weights(_weights(distribution)))

    @abc.abstractmethod
    def apply_weights(self, weights):
        """Map float weight vectors; leading axes are batch axes."""

    @abc.abstractmethod
    def apply_exact(self, weights):
        """Map a list of Fractions to a list of Fractions."""

    @abc.abstractmethod
    def parameters(self):
        pass

    def descriptor(self):
        return {"kind": self.kind.value, **self.parameters()}

    def __repr__(self):
        params = ", ".join(f"{k}={v}" for k, v in self.parameters().items())
        return f"<{type(self).__name__}({params})>"


class ConvolutionMap(SimplexMap):
    kind = types.MapKind.CONVOLUTION

    def __init__(self, group):
        self.group = group
        self.labels = group.elements
        self._quotient = group.quotient_table()

    def apply_weights(self, weights):
        weights = np.asarray(weights, dtype=float)
        # T(p)_g = sum_h p_{g h^-1} p_h
        return (weights[..., self._quotient] * weights[..., np.newaxis, :]).sum(axis=-1)

    def apply_exact(self, weights):
        quotient = self._quotient.tolist()
        return [
            sum(weights[quotient[g][h]] * weights[h] for h in range(self.size))
            for g in range(self.size)
        ]

    def parameters(self):
        return {"group": self.group.name, "order": self.group.order}


def _check_binary(labels):
    if len(labels) != 2:
        raise errors.NonBinaryStateSpace(f"Map needs a binary state space, got {len(labels)} labels")


class ParityMap(SimplexMap):
    """Label of a new ball is the parity of the 1's among k draws."""

    kind = types.MapKind.PARITY

    def __init__(self, k, labels=BINARY_PARITY_LABELS):
        _check_binary(labels)
        if int(k) != k or k < 1:
            raise errors.InputError(f"Parity map needs an integer k >= 1, got {k}")
        self.k = int(k)
        self.labels = tuple(labels)

    def apply_weights(self, weights):
        weights = np.asarray(weights, dtype=float)
        odd = (1.0 - (1.0 - 2.0 * weights[..., 1]) ** self.k) / 2.0
        odd = np.clip(odd, 0.0, 1.0)
        return np.stack([1.0 - odd, odd], axis=-1)

    def apply_exact(self, weights):
        odd = (1 - (1 - 2 * weights[1]) ** self.k) / 2
        return [1 - odd, odd]

    def parameters(self):
        return {"k": self.k}


class GenotypeMap(SimplexMap):
    """Allele A frequency after selection under random mating.

    Genotypes AA, Aa, aa reproduce with relative fitness 1 - s, 1, 1 - t.
    """

    kind = types.MapKind.GENOTYPE

    def __init__(self, s, t, labels=BINARY_ALLELE_LABELS):
        _check_binary(labels)
        if s >= 1 or t >= 1:
            raise errors.InvalidFitness(f"Fitness penalties must satisfy s < 1 and t < 1, got s={s}, t={t}")
        self.s = float(s)
        self.t = float(t)
        self.labels = tuple(labels)

    @property
    def equilibrium(self):
        if self.s + self.t == 0:
            return None
        return self.t / (self.s + self.t)

    def apply_weights(self, weights):
        weights = np.asarray(weights, dtype=float)
        p = weights[..., 0]
        denominator = 1.0 - p**2 * self.s - (1.0 - p) ** 2 * self.t
        if np.any(denominator <= 0):
            raise errors.MapDomainError(f"Non-positive genotype denominator for s={self.s}, t={self.t}")
        a = np.clip(p * (1.0 - p * self.s) / denominator, 0.0, 1.0)
        return np.stack([a, 1.0 - a], axis=-1)

    def apply_exact(self, weights):
        s, t = fractions.Fraction(self.s), fractions.Fraction(self.t)
        p = weights[0]
        denominator = 1 - p * p * s - (1 - p) ** 2 * t
        if denominator <= 0:
            raise errors.MapDomainError(f"Non-positive genotype denominator for s={self.s}, t={self.t}")
        a = p * (1 - p * s) / denominator
        return [a, 1 - a]

    def parameters(self):
        return {"s": self.s, "t": self.t}


def convolution_map(group):
    return ConvolutionMap(group)


def parity_map(k, labels=BINARY_PARITY_LABELS):
    return ParityMap(k, labels=labels)


def genotype_map(s, t, labels=BINARY_ALLELE_LABELS):
    return GenotypeMap(s, t, labels=labels)


@dataclasses.dataclass(frozen=True, eq=False)
class FixedPointSet:
    points: list
    attracting_index: int = None
    boundary_vectors: dict = dataclasses.field(default_factory=dict)
    descriptions: list = dataclasses.field(default_factory=list)

    @property
    def attracting(self):
        if self.attracting_index is None:
            raise errors.NoAttractingPoint("Fixed-point set has no attracting point")
        return self.points[self.attracting_index]

    @property
    def boundary_indices(self):
        return sorted(j for j in self.boundary_vectors if j != self.attracting_index)

    def min_distance(self):
        distances = [
            a.distance(b)
            for i, a in enumerate(self.points)
            for b in self.points[i + 1:]
        ]
        return min(distances) if distances else None

    def to_dict(self, labels):
        return {
            "points": [
                {
                    "weights": point.to_list(),
                    "support": [labels[i] for i in np.flatnonzero(point.support)],
                    "description": description,
                    "attracting": i == self.attracting_index,
                }
                for i, (point, description) in enumerate(zip(self.points, self.descriptions))
            ],
            "attracting_index": self.attracting_index,
        }


def boundary_vector(point):
    # 1 off the support, 0 on it
    return (~point.support).astype(float)


def _build(simplex_map, candidates, attracting_index):
    points, descriptions = [], []
    attracting = None
    for i, (point, description) in enumerate(candidates):
        residual = simplex_map.apply(point).sup_distance(point)
        if residual > const.FIXED_POINT_TOLERANCE:
            logger.debug("Dropping candidate %s, residual %s", description, residual)
            continue
        if i == attracting_index:
            attracting = len(points)
        points.append(point)
        descriptions.append(description)

    if attracting is None:
        logger.warning("No attracting fixed point for %r", simplex_map)

    vectors = {
        j: boundary_vector(point)
        for j, point in enumerate(points)
        if not point.support.all()
    }
    return FixedPointSet(points, attracting, vectors, descriptions)


def _convolution_candidates(simplex_map, subgroup_cap):
    group = simplex_map.group
    subgroups = groups.enumerate_subgroups(group, cap=subgroup_cap)
    candidates = [
        (
            Distribution.uniform_on(subgroup.member_mask),
            "uniform on {" + ",".join(group.elements[i] for i in subgroup.members) + "}",
        )
        for subgroup in subgroups
    ]
    # The whole group is last, subgroups are sorted by order
    return candidates, len(candidates) - 1


def _parity_candidates(simplex_map):
    zero, one = simplex_map.labels
    candidates = [
        (Distribution.point_mass(2, 0), f"all {zero}"),
        (Distribution.point_mass(2, 1), f"all {one}"),
        (Distribution.uniform(2), "uniform"),
    ]
    attracting = 2 if simplex_map.k >= 2 else None
    return candidates, attracting


def genotype_attracting(s, t):
    # 0 -> allele A lost, 1 -> allele A fixed, "interior" -> t / (s + t)
    if s > 0 and t > 0:
        return "interior"
    if s <= 0 and t >= 0 and (s, t) != (0, 0):
        return 1.0
    if s >= 0 and t <= 0 and (s, t) != (0, 0):
        return 0.0
    return None


def _genotype_candidates(simplex_map):
    s, t = simplex_map.s, simplex_map.t
    candidates = [
        (Distribution.binary(0.0), "p = 0"),
        (Distribution.binary(1.0), "p = 1"),
    ]
    if (s > 0 and t > 0) or (s < 0 and t < 0):
        q = simplex_map.equilibrium
        candidates.append((Distribution.binary(q), f"p = {q!r}"))
    elif s == 0 and t == 0:
        candidates.append((Distribution.binary(0.5), "p = 0.5 (every point is fixed)"))

    attracting = genotype_attracting(s, t)
    if attracting == "interior":
        index = 2
    elif attracting is None:
        index = None
    else:
        index = 1 if attracting == 1.0 else 0
    return candidates, index


def find_fixed_points(simplex_map, subgroup_cap=const.DEFAULT_SUBGROUP_CAP):
    if simplex_map.kind == types.MapKind.CONVOLUTION:
        candidates, attracting = _convolution_candidates(simplex_map, subgroup_cap)
    elif simplex_map.kind == types.MapKind.PARITY:
        candidates, attracting = _parity_candidates(simplex_map)
    elif simplex_map.kind == types.MapKind.GENOTYPE:
        candidates, attracting = _genotype_candidates(simplex_map)
    else:
        raise errors.InputError(f"Unsupported map kind {simplex_map.kind}")

    fixed_points = _build(simplex_map, candidates, attracting)
    logger.info(
        "Found %s fixed points for %r, attracting index %s",
        len(fixed_points.points),
        simplex_map,
        fixed_points.attracting_index,
    )
    return fixed_points


def is_constant_on_support(weights, tolerance=1e-9):
    weights = np.asarray(weights, dtype=float)
    support = weights[weights > tolerance]
    return bool(support.size == 0 or support.max() - support.min() <= tolerance)
