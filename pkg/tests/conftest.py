import numpy as np
import pytest

from absum import SeriesView, WeightSeq
from absum.seqcore import TruncWindow


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile/load the jitted kernels once so timed tests measure
    steady-state behaviour, not JIT compilation."""
    from absum.kernels import (diff_table, kahan_cumsum, mean_table,
                               power_scan, unit_diff_table, unit_power_scan)

    a = np.linspace(0.1, 1.0, 24)
    p = np.ones(8)
    P = np.cumsum(p)
    cuts = np.asarray([0, 2], dtype=np.int64)
    kahan_cumsum(a)
    diff_table(a, P, p, 7, 4)
    unit_diff_table(a, 7, 4)
    mean_table(a, P, p, 7, 4)
    power_scan(a, P, p, p, 1.5, 7, 4, cuts)
    unit_power_scan(a, 1.5, 7, 4, cuts)


def series_grid():
    """The five shipped series families, one instance each."""
    return [
        SeriesView.unit_basis(3),
        SeriesView.geometric(0.6),
        SeriesView.power(-1.5),
        SeriesView.alternating(),
        SeriesView("bounded_partial_sums", generator={"kind": "sine"}),
    ]


def weight_grid():
    """The three shipped weight families, one instance each."""
    return [WeightSeq.unit(), WeightSeq.arithmetic(1.0, 1.0),
            WeightSeq.geometric(1.05)]


def random_series(rng, length=40, scale=1.0):
    return SeriesView.explicit((scale * rng.standard_normal(length)).tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_window():
    return TruncWindow(m_max=48, n_max=24)
