"""Stable seed derivation for independent random-number lanes.

Every stochastic component of a run draws from its own ``random.Random``
stream whose seed is derived from the scenario's master seed and a textual
lane label. The derivation is SHA-256 based so it is stable across Python
versions, platforms and process boundaries (unlike ``hash()``).
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(master_seed: int, *labels: object) -> int:
    """Derive a 64-bit sub-seed from ``master_seed`` and a label path."""
    payload = ":".join([str(int(master_seed)), *(str(part) for part in labels)])
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def replicate_seed(master_seed: int, replicate: int) -> int:
    """Sub-seed for replicate ``replicate`` (0-based) of a batch."""
    return derive_seed(master_seed, "replicate", replicate)


def lane(master_seed: int, *labels: object) -> random.Random:
    """A fresh ``random.Random`` seeded from the label path."""
    return random.Random(derive_seed(master_seed, *labels))
