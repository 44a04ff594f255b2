import numpy as np

from freelip.metric_space import adjoin_equidistant, from_graph, random_metric


def random_base_map(source, target, rng):
    out = [int(rng.integers(target.n)) for _ in range(source.n)]
    out[source.base] = target.base
    return out


def symmetric_space(seed, mode="exact"):
    """Spaces likely to have nontrivial isometries: small-range random metrics
    and cycles with an equidistant base."""
    rng = np.random.default_rng(seed)
    if seed % 2:
        return random_metric(int(rng.integers(3, 9)), seed=seed, mode=mode, low=1, high=2)
    k = int(rng.integers(3, 9))
    cyc = from_graph([(i, (i + 1) % k) for i in range(k)], mode=mode)
    return adjoin_equidistant(cyc)
