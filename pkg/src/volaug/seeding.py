"""Deterministic random streams keyed by stable identifiers.

Every augmented output draws from its own generator derived from
(master seed, volume id, variant kind, variant index), so results do not
depend on processing order or parallelism.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_rng(master_seed: int, *key_parts) -> np.random.Generator:
    """Generator for the stream identified by ``key_parts`` under ``master_seed``.

    The key is hashed with SHA-256 (stable across processes, unlike ``hash``)
    and folded into the seed sequence's spawn key.
    """
    material = "\x1f".join(str(p) for p in key_parts).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    spawn_key = tuple(
        int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)
    )
    ss = np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1),
                                spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(ss))
