import pathlib

import pytest

from urns import groups
from urns import tables


@pytest.mark.parametrize("table", tables.ALL_TABLES.values())
def test_table_paths_exists(table):
    assert pathlib.Path(table).exists()


@pytest.mark.parametrize(
    "name,order,abelian,subgroups",
    [
        ("klein", 4, True, 5),
        ("quaternion", 8, False, 6),
    ],
)
def test_bundled_table(name, order, abelian, subgroups):
    group = groups.load_cayley_table(tables.resolve(name))

    assert group.order == order
    assert group.is_abelian() == abelian
    assert len(groups.enumerate_subgroups(group)) == subgroups


def test_quaternion_relations():
    group = groups.load_cayley_table(tables.QUATERNION)
    i, j, k = (group.index(x) for x in ("i", "j", "k"))

    assert group.multiply(i, j) == k
    assert group.multiply(j, i) == group.index("-k")
    assert group.element_order(i) == 4


def test_resolve_passes_paths_through():
    assert tables.resolve("some/table.yml") == "some/table.yml"
