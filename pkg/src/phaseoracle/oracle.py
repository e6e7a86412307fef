"""Phase-decorated oracle unitaries.

The oracle for a set X of n-bit strings acts on basis states as

    U |x, 0> = exp(i phi0[x]) |x, f(x)>
    U |x, 1> = exp(i phi1[x]) |x, 1 xor f(x)>

so it is a permutation of basis states with unit-modulus weights.  It is
applied pair-by-pair over ``(amp[x, 0], amp[x, 1])`` without ever forming a
dense matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import rng
from .errors import ConfigurationError, DomainError
from .hilbert import EPS_NORM, StateVector

TWO_PI = 2.0 * math.pi
FAITHFUL_MAX_N = 10


def _bits(values, n: int, what: str) -> np.ndarray:
    if isinstance(values, str):
        if set(values) - {"0", "1"}:
            raise DomainError(f"{what} string may contain only 0 and 1")
        arr = np.frombuffer(values.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(values)
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise DomainError(f"{what} entries must be 0 or 1")
        arr = arr.astype(np.uint8)
    arr = arr.reshape(-1)
    if arr.shape[0] != 1 << n:
        raise DomainError(f"{what} must have length 2**{n} = {1 << n}, got {arr.shape[0]}")
    return arr


def reduce_angles(angles) -> np.ndarray:
    """Reduce radians into [0, 2*pi)."""
    a = np.mod(np.asarray(angles, dtype=np.float64), TWO_PI)
    # mod can round up to exactly 2*pi for tiny negative inputs
    a[a >= TWO_PI] = 0.0
    return a


def bit_string(bits: np.ndarray) -> str:
    return (np.asarray(bits, dtype=np.uint8) + ord("0")).tobytes().decode("ascii")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class MembershipTable:
    n: int
    f: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"negative width {self.n}")
        object.__setattr__(self, "f", _frozen(_bits(self.f, self.n, "membership table")))

    @classmethod
    def from_set(cls, n: int, members) -> MembershipTable:
        f = np.zeros(1 << n, dtype=np.uint8)
        for x in members:
            if not 0 <= x < (1 << n):
                raise DomainError(f"member {x} out of range for n={n}")
            f[x] = 1
        return cls(n, f)

    @property
    def size(self) -> int:
        """|X|, the number of accepted strings."""
        return int(self.f.sum())

    def __eq__(self, other):
        if not isinstance(other, MembershipTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.f, other.f)

    def __hash__(self):
        return hash((self.n, self.f.tobytes()))

    def __str__(self):
        return bit_string(self.f)


@dataclass(frozen=True)
class PhaseProfile:
    """The 2 * 2**n angles phi[x, y], stored reduced to [0, 2*pi)."""

    n: int
    phi0: np.ndarray = field(repr=False)
    phi1: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("phi0", "phi1"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(-1)
            if arr.shape[0] != 1 << self.n:
                raise DomainError(f"{name} must have length {1 << self.n}, got {arr.shape[0]}")
            if not np.isfinite(arr).all():
                raise DomainError(f"{name} contains non-finite angles")
            object.__setattr__(self, name, _frozen(reduce_angles(arr)))

    def __eq__(self, other):
        if not isinstance(other, PhaseProfile):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.phi0, other.phi0)
            and np.array_equal(self.phi1, other.phi1)
        )

    def __hash__(self):
        return hash((self.n, self.phi0.tobytes(), self.phi1.tobytes()))


class PhaseKind(str, Enum):
    ZERO = "zero"
    F_PI = "f_pi"
    UNIFORM_RANDOM = "uniform_random"
    ENCODE_FUNCTION = "encode_function"
    EXPLICIT = "explicit"


def make_phase_profile(
    n: int,
    kind: PhaseKind | str,
    *,
    membership: MembershipTable | None = None,
    seed: int | None = None,
    h=None,
) -> PhaseProfile:
    """Build one of the named phase regimes.

    ``zero``: every angle 0.  ``f_pi``: phi0[x] = f(x)*pi, phi1 = 0, which makes
    phi0[x] + phi[x, f(x)] = f(x)*pi.  ``uniform_random``: all 2 * 2**n angles iid
    uniform on [0, 2*pi), phi0 drawn first, from the seeded stream.
    ``encode_function``: phi0[x] = (h(x) + 1)*pi mod 2*pi, phi1 = 0.
    """
    kind = PhaseKind(kind)
    size = 1 << n
    zeros = np.zeros(size)
    if kind is PhaseKind.ZERO:
        return PhaseProfile(n, zeros, zeros)
    if kind is PhaseKind.F_PI:
        if membership is None:
            raise DomainError("f_pi phases need a membership table")
        if membership.n != n:
            raise DomainError(f"membership width {membership.n} != {n}")
        return PhaseProfile(n, membership.f * math.pi, zeros)
    if kind is PhaseKind.UNIFORM_RANDOM:
        if seed is None:
            raise ConfigurationError("uniform_random phases need a seed")
        draws = rng.generator(seed, rng.STREAM_PHASES).random(2 * size)
        return PhaseProfile(n, TWO_PI * draws[:size], TWO_PI * draws[size:])
    if kind is PhaseKind.ENCODE_FUNCTION:
        if h is None:
            raise DomainError("encode_function phases need an h table")
        h = _bits(h, n, "h table")
        return PhaseProfile(n, (h.astype(np.float64) + 1.0) * math.pi, zeros)
    raise ConfigurationError("explicit profiles are built directly with PhaseProfile(n, phi0, phi1)")


@dataclass(frozen=True)
class OracleSpec:
    membership: MembershipTable
    phases: PhaseProfile

    def __post_init__(self):
        if self.membership.n != self.phases.n:
            raise DomainError(
                f"membership width {self.membership.n} != phase width {self.phases.n}"
            )

    @property
    def n(self) -> int:
        return self.membership.n


def _check_state(oracle: OracleSpec, state: StateVector) -> None:
    if state.n != oracle.n:
        raise DomainError(f"state width {state.n} != oracle width {oracle.n}")


def apply_oracle(oracle: OracleSpec, state: StateVector) -> StateVector:
    _check_state(oracle, state)
    pairs = state.pairs
    f = oracle.membership.f.astype(bool)
    w0 = np.exp(1j * oracle.phases.phi0) * pairs[:, 0]
    w1 = np.exp(1j * oracle.phases.phi1) * pairs[:, 1]
    out = np.empty_like(pairs)
    out[:, 0] = np.where(f, w1, w0)
    out[:, 1] = np.where(f, w0, w1)
    return StateVector(state.n, out)


def apply_inverse_oracle(oracle: OracleSpec, state: StateVector) -> StateVector:
    """U^-1: |x, f(x)> -> exp(-i phi0[x]) |x, 0>,  |x, 1 xor f(x)> -> exp(-i phi1[x]) |x, 1>."""
    _check_state(oracle, state)
    pairs = state.pairs
    f = oracle.membership.f.astype(bool)
    from_zero = np.where(f, pairs[:, 1], pairs[:, 0])
    from_one = np.where(f, pairs[:, 0], pairs[:, 1])
    out = np.empty_like(pairs)
    out[:, 0] = np.exp(-1j * oracle.phases.phi0) * from_zero
    out[:, 1] = np.exp(-1j * oracle.phases.phi1) * from_one
    return StateVector(state.n, out)


@dataclass(frozen=True)
class FaithfulnessReport:
    status: str  # "checked" | "unchecked"
    is_unitary: bool | None
    preserves_membership: bool | None


def verify_faithful(oracle: OracleSpec, max_n: int = FAITHFUL_MAX_N) -> FaithfulnessReport:
    """Exhaustively re-derive unitarity and membership fidelity (n <= max_n only).

    Every basis state is pushed through :func:`apply_oracle`; the images must
    form an orthonormal set, and measuring y after U|x,0> must give f(x) with
    certainty.
    """
    n = oracle.n
    if n > max_n or n < 1:
        return FaithfulnessReport("unchecked", None, None)
    dim = 1 << (n + 1)
    images = np.empty((dim, dim), dtype=np.complex128)
    for i in range(dim):
        basis = np.zeros(dim, dtype=np.complex128)
        basis[i] = 1.0
        images[:, i] = apply_oracle(oracle, StateVector(n, basis)).amplitudes
    gram = images.conj().T @ images
    is_unitary = bool(np.allclose(gram, np.eye(dim), rtol=0.0, atol=EPS_NORM))

    f = oracle.membership.f
    # column 2x is U|x,0>; marginalize its weights over x' to get Pr(y) per query
    weights = np.abs(images[:, 0::2].reshape(1 << n, 2, 1 << n)) ** 2
    pr_y = weights.sum(axis=0)
    pr_answer = pr_y[f, np.arange(1 << n)]
    preserves = bool(np.all(np.abs(pr_answer - 1.0) <= EPS_NORM))
    return FaithfulnessReport("checked", is_unitary, preserves)


# -- file format -----------------------------------------------------------


def oracle_to_json(oracle: OracleSpec, phase_source: dict | None = None) -> dict:
    """Serialize; without a generator description the phases are written as explicit arrays."""
    phases = dict(phase_source) if phase_source else {
        "kind": "explicit",
        "phi0": [float(a) for a in oracle.phases.phi0],
        "phi1": [float(a) for a in oracle.phases.phi1],
    }
    return {"n": oracle.n, "f": str(oracle.membership), "phases": phases}


def oracle_from_json(doc: dict) -> OracleSpec:
    try:
        n = int(doc["n"])
        membership = MembershipTable(n, str(doc["f"]))
        phases = doc.get("phases", {"kind": "zero"})
        kind = PhaseKind(phases["kind"])
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed oracle document: missing {exc}") from exc
    except ValueError as exc:
        raise ConfigurationError(f"malformed oracle document: {exc}") from exc
    if kind is PhaseKind.EXPLICIT:
        profile = PhaseProfile(n, phases["phi0"], phases["phi1"])
    else:
        profile = make_phase_profile(
            n, kind, membership=membership, seed=phases.get("seed"), h=phases.get("h")
        )
    return OracleSpec(membership, profile)


def load_oracle(path: str | Path) -> OracleSpec:
    with open(path) as fh:
        return oracle_from_json(json.load(fh))
