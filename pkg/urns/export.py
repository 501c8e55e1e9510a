"""Tabular and structured-text output.

Trajectory CSV layout:

    # config-digest: <sha256 of the canonical config>
    # seed: <seed>
    # rng: PCG64 sampler: numpy.random.Generator.multinomial
    n,k,count_<label>...,p_<label>...
"""
import csv
import logging

import numpy as np
import yaml

from urns import const
from urns import engine
from urns import errors
from urns import util

logger = logging.getLogger(__name__)

COMMENT = "# "


def trajectory_header(labels):
    return ["n", "k"] + [f"count_{label}" for label in labels] + [f"p_{label}" for label in labels]


def write_trajectory(trajectory, fh, config_digest):
    fh.write(f"{COMMENT}config-digest: {config_digest}\n")
    fh.write(f"{COMMENT}seed: {trajectory.seed}\n")
    fh.write(f"{COMMENT}rng: {const.RNG_NAME} sampler: {const.SAMPLER_NAME}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(trajectory_header(trajectory.labels))
    for snapshot in trajectory.snapshots:
        writer.writerow(
            [snapshot.n, snapshot.total]
            + list(snapshot.counts)
            + [util.format_float(c / snapshot.total) for c in snapshot.counts]
        )


def read_trajectory(fh):
    name = getattr(fh, "name", "<stream>")
    metadata = {}
    lines = []
    for line in fh:
        if line.startswith(COMMENT):
            key, _, value = line[len(COMMENT):].partition(":")
            metadata[key.strip()] = value.strip()
        elif line.strip():
            lines.append(line)

    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise errors.InputError(f"Trajectory file {name} is empty")
    if header[:2] != ["n", "k"] or (len(header) - 2) % 2:
        raise errors.InputError(f"Trajectory file {name} has an unexpected header {header}")
    size = (len(header) - 2) // 2
    labels = tuple(column[len("count_"):] for column in header[2:2 + size])

    snapshots = []
    for row in reader:
        try:
            n, total, *counts = (int(x) for x in row[:2 + size])
        except ValueError:
            raise errors.InputError(f"Trajectory file {name} has a malformed row {row}")
        if sum(counts) != total:
            raise errors.InputError(f"Trajectory file {name} row n={n}: counts do not sum to k={total}")
        snapshots.append(engine.Snapshot(n, total, tuple(counts)))
    if not snapshots:
        raise errors.InputError(f"Trajectory file {name} has no rows")

    seed = metadata.get("seed")
    logger.debug("Read %s snapshots from %s", len(snapshots), name)
    return engine.Trajectory(
        seed=int(seed) if seed is not None else None,
        schedule={},
        simplex_map={},
        labels=labels,
        snapshots=snapshots,
        config_digest=metadata.get("config-digest"),
    )


def write_drift(records, fh):
    writer = None
    for record in records:
        row = record.to_row()
        if writer is None:
            writer = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
            writer.writeheader()
        writer.writerow({k: util.format_float(v) if isinstance(v, float) else v for k, v in row.items()})


def _plain(data):
    # numpy scalars and tuples are not safe_dump-able
    if isinstance(data, dict):
        return {_plain(k): _plain(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [_plain(v) for v in data]
    if isinstance(data, np.generic):
        return data.item()
    if isinstance(data, np.ndarray):
        return data.tolist()
    return data


def dump_structured(data, fh=None):
    text = yaml.safe_dump(_plain(data), sort_keys=False)
    if fh is not None:
        fh.write(text)
    return text
