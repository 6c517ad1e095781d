"""
Seeded random instances for the property suites.

Step coefficients: up to ``max_jumps`` jumps at uniform positions, initial
level zero with probability 1/2 (otherwise exponential), exponentially
distributed increments.  Every generator takes a ``numpy.random.Generator``
so suites can derive one stream per instance from ``(seed, index)``.
"""

from __future__ import annotations

import numpy as np

from .density import Density, RhoFunction


def instance_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(stream), int(index)])


def random_interval(rng, lo=0.0, hi=10.0, min_len=1e-3):
    while True:
        a, b = np.sort(rng.uniform(lo, hi, 2))
        if b - a >= min_len and a > lo:
            return float(a), float(b)


def random_step_rho(rng, a, b, max_jumps=8, scale=1.0) -> RhoFunction:
    """Nonnegative nondecreasing step function on ``[a, b]``."""
    k = int(rng.integers(0, max_jumps + 1))
    jumps = np.sort(rng.uniform(a, b, k))
    # drop coincident draws (measure zero, but keep the constructor happy)
    jumps = jumps[np.concatenate([[True], np.diff(jumps) > 0])] if k else jumps
    jumps = jumps[(jumps > a) & (jumps < b)]
    l0 = 0.0 if rng.uniform() < 0.5 else float(rng.exponential(scale))
    levels = l0 + np.concatenate([[0.0], np.cumsum(rng.exponential(scale, jumps.size))])
    if jumps.size == 0:
        return RhoFunction.constant(a, b, l0)
    return RhoFunction.step(a, b, jumps.tolist(), levels.tolist())


def random_density(rng) -> Density:
    """Random member of the four families with ``h(0)`` in ``[-1, 1]``."""
    fam = int(rng.integers(0, 4))
    h0 = float(rng.uniform(-1.0, 1.0))
    if fam == 0:
        return Density("constant", (h0,), h0)
    if fam == 1:
        return Density("linear", (float(rng.uniform(0.0, 2.0)),), h0)
    if fam == 2:
        return Density("power", (float(rng.uniform(0.05, 1.5)), float(rng.uniform(1.0, 3.0))), h0)
    n = int(rng.integers(1, 4))
    knots = np.sort(rng.uniform(0.1, 2.5, n))
    slopes = np.cumsum(rng.exponential(0.7, n + 1))
    if rng.uniform() < 0.5:
        slopes[0] = 0.0
        slopes = np.maximum.accumulate(slopes)
    params = [float(slopes[0])]
    for t, s in zip(knots, slopes[1:]):
        params += [float(t), float(s)]
    return Density("piecewise-linear", tuple(params), h0)
