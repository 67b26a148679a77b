import numpy as np
import pytest

import samplemeans as sm


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Compile / load the active backend's kernels once so timing-sensitive
    # tests measure algorithm work, not JIT latency.
    X = np.random.default_rng(0).normal(size=(64, 3))
    C = sm.kmeanspp_init(X, 2, np.random.default_rng(1))
    sm.lloyd(X, C)
    sm.big_means(X, 2, 32, sm.StopCondition(max_samples=2), rng=np.random.default_rng(2))
