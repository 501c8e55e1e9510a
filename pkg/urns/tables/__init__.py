import pathlib


CURDIR = pathlib.Path(__file__).parent
KLEIN = CURDIR / "klein.yml"
QUATERNION = CURDIR / "quaternion.yml"

ALL_TABLES = {
    str(table.with_suffix("").name): str(table.resolve())
    for table in [
        KLEIN,
        QUATERNION,
    ]
}


def resolve(name_or_path):
    # Bundled table name, e.g. "quaternion", or a path to a YAML Cayley table
    return ALL_TABLES.get(name_or_path, name_or_path)
