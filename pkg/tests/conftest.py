from __future__ import annotations

import numpy as np
import pytest

from hyperego.simplices import from_records, write_dataset

# Eight papers on eight authors, in arrival order; two share the year 1998 and
# are kept in file order.
TOY_SETS = [{2, 3}, {1, 2, 3}, {1, 2}, {2, 8, 4}, {1, 2, 3}, {4, 1, 8}, {2, 3, 5, 6}, {1, 5, 7}]
TOY_TIMES = [1995, 1996, 1997, 1998, 1998, 1999, 2000, 2001]

TOY_STAR = [{1, 2, 3}, {1, 2}, {1, 2, 3}, {4, 1, 8}, {1, 5, 7}]
TOY_RADIAL = [{2, 3}, {1, 2, 3}, {1, 2}, {2, 8, 4}, {1, 2, 3}, {4, 1, 8}, {1, 5, 7}]
TOY_CONTRACTED = [{2, 3}, {1, 2, 3}, {1, 2}, {2, 8, 4}, {1, 2, 3}, {4, 1, 8}, {2, 3, 5}, {1, 5, 7}]


@pytest.fixture
def toy():
    return from_records(zip(TOY_SETS, TOY_TIMES), "toy")


@pytest.fixture
def toy_prefix(tmp_path, toy):
    prefix = tmp_path / "toy"
    write_dataset(toy, prefix)
    return prefix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def as_sets(simplices):
    return [set(s.nodes) for s in simplices]
