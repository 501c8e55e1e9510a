"""Finite groups stored as dense Cayley tables, and their subgroups.

All computation happens on element indices; labels are opaque strings used
for input and output only.
"""
import dataclasses
import itertools
import logging
import math
import pathlib

import numpy as np
import yaml

from urns import const
from urns import errors
from urns import types

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class FiniteGroup:
    elements: tuple
    table: np.ndarray
    identity: int
    inverse: tuple
    name: str = ""

    @property
    def order(self):
        return len(self.elements)

    def multiply(self, i, j):
        return int(self.table[i, j])

    def index(self, label):
        try:
            return self.elements.index(label)
        except ValueError:
            raise errors.UnknownElement(f"Unknown element {label!r} in group {self.name}")

    def is_abelian(self):
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, i):
        order, current = 1, i
        while current != self.identity:
            current = self.multiply(current, i)
            order += 1
        return order

    def quotient_table(self):
        # quotient[g, h] = index of g * h^-1
        return self.table[:, list(self.inverse)]

    def __repr__(self):
        return f"<FiniteGroup({self.name or self.order})>"


@dataclasses.dataclass(frozen=True)
class Subgroup:
    member_mask: tuple

    @property
    def order(self):
        return sum(self.member_mask)

    @property
    def members(self):
        return tuple(i for i, member in enumerate(self.member_mask) if member)

    def __contains__(self, i):
        return self.member_mask[i]

    @classmethod
    def from_members(cls, order, members):
        members = set(members)
        return cls(tuple(i in members for i in range(order)))


def validate_group(elements, table, name=""):
    elements = tuple(str(e) for e in elements)
    n = len(elements)
    if n == 0:
        raise errors.NotSquare("Cayley table is empty")
    if len(set(elements)) != n:
        raise errors.NotSquare(f"Duplicate element labels in {list(elements)}")

    rows = [list(row) for row in table]
    if len(rows) != n or any(len(row) != n for row in rows):
        raise errors.NotSquare(f"Cayley table must be {n}x{n} for {n} elements")
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if not isinstance(entry, (int, np.integer)) or not 0 <= entry < n:
                raise errors.NotSquare(f"Entry ({i}, {j}) = {entry!r} is not an index in 0..{n - 1}")

    array = np.array(rows, dtype=np.int64)
    full = np.arange(n)
    for i in range(n):
        if not np.array_equal(np.sort(array[i]), full):
            raise errors.NotLatinSquare(f"Row {i} ({elements[i]}) is not a permutation")
    for j in range(n):
        if not np.array_equal(np.sort(array[:, j]), full):
            raise errors.NotLatinSquare(f"Column {j} ({elements[j]}) is not a permutation")

    identity = next(
        (e for e in range(n) if np.array_equal(array[e], full) and np.array_equal(array[:, e], full)),
        None,
    )
    if identity is None:
        raise errors.NoIdentity("No element acts as a two-sided identity")

    inverse = []
    for i in range(n):
        candidates = np.flatnonzero(array[i] == identity)
        j = int(candidates[0])
        if array[j, i] != identity:
            raise errors.NoInverse(f"Element {i} ({elements[i]}) has no two-sided inverse")
        inverse.append(j)

    # One n x n slice per left factor: left[j, k] = (i*j)*k, right[j, k] = i*(j*k)
    for i in range(n):
        left = array[array[i]]
        right = array[i][array]
        violations = np.argwhere(left != right)
        if violations.size:
            j, k = (int(x) for x in violations[0])
            raise errors.NotAssociative(
                f"({elements[i]}*{elements[j]})*{elements[k]} != {elements[i]}*({elements[j]}*{elements[k]})"
            )

    array.setflags(write=False)
    return FiniteGroup(elements, array, identity, tuple(inverse), name=name)


def from_labels(elements, table, name=""):
    elements = [str(e) for e in elements]
    lookup = {label: i for i, label in enumerate(elements)}
    rows = []
    for row in table:
        indices = []
        for label in row:
            if str(label) not in lookup:
                raise errors.UnknownElement(f"Table entry {label!r} is not one of {elements}")
            indices.append(lookup[str(label)])
        rows.append(indices)
    return validate_group(elements, rows, name=name)


def load_cayley_table(path):
    path = pathlib.Path(path)
    logger.info("Loading Cayley table %s", path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as e:
        raise errors.GroupError(f"Cannot read Cayley table {path}: {e}")
    except yaml.YAMLError as e:
        raise errors.GroupError(f"Cayley table {path} is not valid YAML: {e}")
    if not isinstance(data, dict) or "elements" not in data or "table" not in data:
        raise errors.GroupError(f"{path} must define 'elements' and 'table'")
    return from_labels(data["elements"], data["table"], name=data.get("name", path.stem))


def dump_cayley_table(group):
    return {
        "name": group.name,
        "elements": list(group.elements),
        "table": [[group.elements[j] for j in row] for row in group.table.tolist()],
    }


def cyclic(n):
    if n < 1:
        raise errors.InputError(f"Cyclic group needs n >= 1, got {n}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return validate_group([str(i) for i in range(n)], table, name=f"Z{n}")


def dihedral(n):
    # r0..r(n-1) rotations, s0..s(n-1) reflections, order 2n
    if n < 3:
        raise errors.InputError(f"Dihedral group needs n >= 3, got {n}")
    table = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            table[i][j] = (i + j) % n
            table[i][j + n] = n + (i + j) % n
            table[i + n][j] = n + (i - j) % n
            table[i + n][j + n] = (i - j) % n
    labels = [f"r{i}" for i in range(n)] + [f"s{i}" for i in range(n)]
    return validate_group(labels, table, name=f"D{n}")


def permutation_label(perm):
    separator = "" if len(perm) < 10 else " "
    return separator.join(str(x + 1) for x in perm)


def symmetric(n, cap=const.DEFAULT_SYMMETRIC_CAP):
    if n < 1:
        raise errors.InputError(f"Symmetric group needs n >= 1, got {n}")
    if math.factorial(n) > cap:
        raise errors.SizeCapExceeded(f"S{n} has order {math.factorial(n)} > cap {cap}")
    perms = list(itertools.permutations(range(n)))
    lookup = {perm: i for i, perm in enumerate(perms)}
    # (a*b)(x) = a(b(x))
    table = [[lookup[tuple(a[b[x]] for x in range(n))] for b in perms] for a in perms]
    return validate_group([permutation_label(p) for p in perms], table, name=f"S{n}")


def direct_product(g, h):
    pairs = [(i, j) for i in range(g.order) for j in range(h.order)]
    lookup = {pair: k for k, pair in enumerate(pairs)}
    table = [
        [lookup[(g.multiply(a, c), h.multiply(b, d))] for (c, d) in pairs]
        for (a, b) in pairs
    ]
    labels = [f"({g.elements[i]},{h.elements[j]})" for i, j in pairs]
    return validate_group(labels, table, name=f"{g.name}x{h.name}")


def builtin_group(family, n=None, factors=None, cap=const.DEFAULT_SYMMETRIC_CAP):
    family = types.GroupFamily(family)
    if family == types.GroupFamily.DIRECT_PRODUCT:
        if not factors or len(factors) != 2:
            raise errors.InputError("direct_product needs exactly two factor groups")
        group = direct_product(*factors)
        if group.order > cap:
            raise errors.SizeCapExceeded(f"{group.name} has order {group.order} > cap {cap}")
        return group
    if n is None:
        raise errors.InputError(f"{family.value} group needs parameter n")
    if family == types.GroupFamily.CYCLIC:
        return cyclic(n)
    elif family == types.GroupFamily.DIHEDRAL:
        return dihedral(n)
    return symmetric(n, cap=cap)


def closure(group, seeds):
    seeds = list(seeds)
    if not seeds:
        raise errors.InputError("closure needs at least one seed element")
    members = {group.identity}
    frontier = [group.identity]
    while frontier:
        x = frontier.pop()
        for g in seeds:
            y = group.multiply(x, g)
            if y not in members:
                members.add(y)
                frontier.append(y)
    return Subgroup.from_members(group.order, members)


def generates_group(group, seeds):
    return closure(group, seeds).order == group.order


def _subgroup_key(subgroup):
    return (subgroup.order, tuple(not m for m in subgroup.member_mask))


def enumerate_subgroups(group, cap=const.DEFAULT_SUBGROUP_CAP):
    if group.order > cap:
        raise errors.SizeCapExceeded(f"Subgroup enumeration of order {group.order} > cap {cap}")

    found = {closure(group, [g]) for g in range(group.order)}
    pending = list(itertools.combinations(found, 2))
    while pending:
        new = set()
        for h, k in pending:
            joined = closure(group, h.members + k.members)
            if joined not in found:
                new.add(joined)
        pending = [(h, k) for h in new for k in found | new if h != k]
        found |= new

    subgroups = sorted(found, key=_subgroup_key)
    logger.debug("Found %s subgroups of %s", len(subgroups), group.name)
    return subgroups


def is_subgroup(group, members):
    members = set(members)
    if group.identity not in members:
        return False
    return all(group.multiply(a, b) in members for a in members for b in members)


def exhaustive_subgroups(group, cap=const.EXHAUSTIVE_SUBGROUP_CAP):
    # Oracle: test every subset containing the identity
    if group.order > cap:
        raise errors.SizeCapExceeded(f"Exhaustive subgroup search of order {group.order} > cap {cap}")
    others = [i for i in range(group.order) if i != group.identity]
    result = []
    for size in range(len(others) + 1):
        for subset in itertools.combinations(others, size):
            members = (group.identity,) + subset
            if is_subgroup(group, members):
                result.append(Subgroup.from_members(group.order, members))
    return sorted(result, key=_subgroup_key)
