import math

import numpy as np

from eventgibbs import (
    EventSet,
    PowersetDistribution,
    ValueFunction,
    default_eventset,
    uniform,
)

LN2 = math.log(2.0)


def random_instance(rng, n, vmax=5.0, floor=0.05):
    """Random full-support instance: V ~ U[0, vmax], p* proportional to U[floor, 1]."""
    es = default_eventset(n)
    v = ValueFunction(es, rng.uniform(0.0, vmax, es.size))
    w = rng.uniform(floor, 1.0, es.size)
    return PowersetDistribution(es, w / w.sum()), v


def monoplet():
    es = EventSet(("x",))
    return PowersetDistribution(es, [0.5, 0.5]), ValueFunction(es, [0.0, 1.0])


def doublet():
    es = EventSet(("x", "y"))
    return uniform(es), ValueFunction(es, [0.0, 1.0, 2.0, 3.0])


def brute_kl(p, q):
    total = 0.0
    for a, b in zip(p, q):
        if a > 0:
            if b <= 0:
                return math.inf
            total += a * math.log(a / b)
    return total
