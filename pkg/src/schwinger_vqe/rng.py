"""Deterministic random-number plumbing.

All stochastic components draw from numpy's Philox counter-based generator,
whose streams are specified by the algorithm and therefore reproducible
bit-for-bit across platforms. Sub-task seeds are derived by hashing the
master seed together with a string tag path, so independent tasks
(shots, trajectories, bootstrap resamples) get decorrelated streams that
do not depend on execution order.
"""
from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, *tags: object) -> int:
    """Derive a 64-bit sub-seed from a master seed and a tag path."""
    path = "/".join(str(t) for t in tags)
    digest = hashlib.sha256(f"{master_seed}:{path}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(seed: int) -> np.random.Generator:
    """Philox-backed generator for a derived seed."""
    return np.random.Generator(np.random.Philox(key=seed))
