"""Deterministic seed derivation.

All randomness in the package flows from a single master seed through named
substreams.  Labels are hashed with SHA-256 so the derived seeds are stable
across platforms and releases, and adding a new consumer never perturbs the
streams of existing ones.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(master: int, label: str) -> int:
    """Derive a 64-bit substream seed from a master seed and a stream label."""
    h = hashlib.sha256(f"{master & MASK64}:{label}".encode("utf-8")).digest()
    return int.from_bytes(h[:8], "little")


def make_rng(seed: int, stream_id: int = 0) -> np.random.Generator:
    """PCG64 generator keyed by (seed, stream_id)."""
    return np.random.default_rng([seed & MASK64, stream_id & MASK64])
