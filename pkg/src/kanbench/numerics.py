"""Dense linear algebra and seeded random-stream derivation.

Matrices are plain 2-D ``numpy.ndarray`` objects with dtype float64 and
row-major (C) layout; random streams are ``numpy.random.Generator``
instances.  Both are wrapped behind small functions so the rest of the
library has a single, checked entry point for each operation.

Stream derivation is counter-based: ``rng_derive(master_seed, stream_id)``
hashes the pair through ``numpy.random.SeedSequence``, so any stream can be
reconstructed in isolation and streams with distinct ids are statistically
independent regardless of the order they are created in.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

Matrix = np.ndarray
RngStream = np.random.Generator


def as_matrix(data) -> Matrix:
    """Coerce nested sequences / arrays to a float64 2-D row-major matrix."""
    m = np.ascontiguousarray(data, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product a @ b with an explicit inner-dimension check."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"mat_mul needs 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"mat_mul shape mismatch: {a.shape[0]}x{a.shape[1]} times "
            f"{b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def rng_derive(master_seed: int, stream_id: int) -> RngStream:
    """Derive an independent, reproducible random stream.

    The same (master_seed, stream_id) pair always yields the same stream;
    changing either value yields an unrelated one.
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(stream_id,))
    return np.random.Generator(np.random.PCG64(seq))


def standard_normal(rng: RngStream, n: int) -> np.ndarray:
    """Draw n i.i.d. standard-normal values (ziggurat transform of uniforms)."""
    if n < 0:
        raise ShapeError(f"cannot draw a negative number of samples: {n}")
    return rng.standard_normal(n)
