import hashlib
import json
import math

import numpy as np


def compact_dumps(data):
    return json.dumps(data, separators=(",", ":"), sort_keys=True)


def digest(data):
    return hashlib.sha256(compact_dumps(data).encode("utf-8")).hexdigest()


def format_float(value):
    # repr gives the shortest string that round-trips
    return repr(float(value))


def parse_seeds(s):
    # E.g. "1,2,3" -> [1, 2, 3]
    try:
        return [int(part) for part in s.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"Invalid seed list: {s}")


def parse_seed_range(s):
    # E.g. "0..3" -> [0, 1, 2, 3]
    start, sep, stop = s.partition("..")
    if not sep:
        raise ValueError(f"Invalid seed range: {s}")
    try:
        start, stop = int(start), int(stop)
    except ValueError:
        raise ValueError(f"Invalid seed range: {s}")
    if stop < start:
        raise ValueError(f"Empty seed range: {s}")
    return list(range(start, stop + 1))


def compositions(total, parts):
    # All vectors of `parts` non-negative integers summing to `total`
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def composition_count(total, parts):
    return math.comb(total + parts - 1, parts - 1)


def multinomial_coefficient(counts):
    result = 1
    remaining = sum(counts)
    for count in counts:
        result *= math.comb(remaining, count)
        remaining -= count
    return result


def total_variation(a, b):
    return 0.5 * float(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)).sum())
