import numpy as np
import pytest

from wcsbundle import hyperdual as hd
from wcsbundle.geometry import ChartMetric


def warped_metric(dim: int, seed: int = 0, eps: float = 0.15) -> ChartMetric:
    """A smooth non-flat metric ``I + eps * S(x)`` with trigonometric entries."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim))
    a = 0.5 * (a + a.T)
    w = rng.normal(size=(dim, dim, dim))

    def fn(c):
        rows = []
        for i in range(dim):
            row = []
            for j in range(dim):
                phase = 0.0
                for k in range(dim):
                    phase = phase + 0.5 * (w[i, j, k] + w[j, i, k]) * hd.asarray(c[k])
                entry = eps * a[i, j] * hd.sin(phase + 0.3)
                row.append(entry + 1.0 if i == j else entry)
            rows.append(row)
        return hd.stack_matrix(rows)

    return ChartMetric(dim, fn, f"warped{dim}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
