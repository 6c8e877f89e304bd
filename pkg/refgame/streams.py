# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, purpose, index)``; inside a
stream the counter walks through steps and components in row-major order. A
draw therefore depends only on its key and position, never on the thread that
computed it or on how many other streams were drawn before.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np
from scipy.special import ndtri

from refgame.parallel import chunk_bounds, ordered_map

_MASK64 = (1 << 64) - 1
_PURPOSE_SHIFT = 40
_MANTISSA = float(2**53)


class Purpose(IntEnum):
    PATHS = 0
    INNER_PATHS = 1
    AUDIT = 2
    DOMAIN_SAMPLES = 3
    PROBES = 4
    QUADRATURE = 5


def generator(seed: int, index: int, purpose: Purpose = Purpose.PATHS) -> np.random.Generator:
    key = np.array([int(seed) & _MASK64, (int(purpose) << _PURPOSE_SHIFT) | int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def open_uniforms(gen: np.random.Generator, shape) -> np.ndarray:
    """Uniforms on the open interval (0, 1), midpoints of the 53-bit lattice."""
    return (gen.random(shape) * _MANTISSA + 0.5) / _MANTISSA


def normals(gen: np.random.Generator, shape) -> np.ndarray:
    return ndtri(open_uniforms(gen, shape))


def path_normals(seed: int,
                 path_count: int,
                 steps: int,
                 dim: int,
                 purpose: Purpose = Purpose.PATHS,
                 antithetic: bool = False,
                 threads: int = 1) -> np.ndarray:
    """Standard normals of shape (path_count, steps, dim), one stream per path.

    With `antithetic`, paths 2j and 2j+1 share stream j with opposite signs.
    """
    blocks = ordered_map(lambda bounds: normal_block(seed, bounds, steps, dim, purpose, antithetic),
                         chunk_bounds(path_count), threads)
    if not blocks:
        return np.empty((0, steps, dim))
    return np.concatenate(blocks, axis=0)


def normal_block(seed: int,
                 bounds: tuple[int, int],
                 steps: int,
                 dim: int,
                 purpose: Purpose = Purpose.PATHS,
                 antithetic: bool = False) -> np.ndarray:
    """Normals of the paths `start <= path < stop`, shape (stop - start, steps, dim)."""
    start, stop = bounds
    block = np.empty((stop - start, steps, dim))
    for offset, path in enumerate(range(start, stop)):
        if antithetic:
            draw = normals(generator(seed, path // 2, purpose), (steps, dim))
            block[offset] = -draw if path % 2 else draw
        else:
            block[offset] = normals(generator(seed, path, purpose), (steps, dim))
    return block
