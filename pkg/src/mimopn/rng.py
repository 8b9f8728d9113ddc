"""Seeded, role-keyed RNG streams.

Every random draw in the simulator comes from a stream derived by hashing
(master seed, context indices, role tag) through numpy's SeedSequence, never
by sequential draws from a shared generator. Trials are therefore
reproducible regardless of execution order or worker scheduling.
"""

import numpy as np

# Stream role tags. Keep values stable: they are part of the reproducibility
# contract (a given seed must produce the same draws forever).
ROLE_UE_TRACE = 1
ROLE_BS_TRACE = 2
ROLE_CHANNEL = 3
ROLE_PILOT_NOISE = 4
ROLE_DATA_NOISE = 5
ROLE_DATA_SYMBOLS = 6
ROLE_EXT_NOISE = 7
ROLE_ANALYTIC_UE = 8
ROLE_ANALYTIC_BS = 9
ROLE_ICI_VAR = 10


def stream(master_seed, *keys):
    """Independent Generator for (master_seed, *keys).

    Same inputs always give the same stream; distinct key tuples give
    statistically independent streams.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(master_seed), *map(int, keys)])))


def complex_normal(rng, shape, var=1.0):
    """Circularly-symmetric complex Gaussian, CN(0, var) per entry."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
