"""Seeded randomness.

Generator identity is part of the output contract, so it is pinned here:

* bit generator: Philox4x64-10 (Random123), as implemented by numpy's
  ``np.random.Philox``, constructed with an explicit 128-bit ``key`` and the
  counter starting at zero.  No SeedSequence hashing is involved.
* key for a purpose stream: ``seed + (stream << 64)`` with ``seed`` < 2**64.
* uniform doubles: ``(raw >> 11) * 2**-53`` (numpy ``Generator.random``).
* per-trial seed: the first raw 64-bit word of Philox keyed by
  ``master + ((index | 2**63) << 64)``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError

RNG_NAME = "philox4x64-10/v1"

STREAM_PHASES = 0
STREAM_MEMBERSHIP = 1
STREAM_FUNCTION = 2
STREAM_SHOTS = 3
STREAM_STATE = 4

_MASK64 = (1 << 64) - 1
_TRIAL_TAG = 1 << 63


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigurationError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ConfigurationError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def generator(seed: int, stream: int = STREAM_PHASES) -> np.random.Generator:
    seed = _check_seed(seed)
    return np.random.Generator(np.random.Philox(key=seed + (stream << 64)))


def derive_seed(master: int, index: int) -> int:
    """Seed for trial ``index`` of a run with master seed ``master``."""
    master = _check_seed(master)
    if index < 0 or index >= _TRIAL_TAG:
        raise ConfigurationError(f"trial index out of range: {index}")
    bitgen = np.random.Philox(key=master + ((index | _TRIAL_TAG) << 64))
    return int(bitgen.random_raw())
