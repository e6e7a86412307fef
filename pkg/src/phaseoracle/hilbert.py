"""Complex state vectors over the query/answer basis |x, y>.

Amplitudes are stored in a flat array of length 2**(n+1) with the answer bit
least significant: ``index(x, y) = 2*x + y``.  Viewed as a ``(2**n, 2)`` array,
row ``x`` holds the pair ``(amp[x, 0], amp[x, 1])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, PreconditionError

EPS_NORM = 1e-10
EPS_VERDICT = 1e-6
N_MAX = 20


@dataclass(frozen=True)
class BasisLabel:
    x: int
    y: int

    def index(self, n: int) -> int:
        return basis_index(self, n)


def basis_index(label: BasisLabel, n: int) -> int:
    if n < 0:
        raise DomainError(f"register width must be non-negative, got {n}")
    if not 0 <= label.x < (1 << n):
        raise DomainError(f"query x={label.x} out of range for n={n}")
    if label.y not in (0, 1):
        raise DomainError(f"answer bit y={label.y} must be 0 or 1")
    return 2 * label.x + label.y


def basis_label(index: int, n: int) -> BasisLabel:
    """Inverse of :func:`basis_index`."""
    if not 0 <= index < (1 << (n + 1)):
        raise DomainError(f"index {index} out of range for n={n}")
    return BasisLabel(index >> 1, index & 1)


def check_width(n: int, n_max: int = N_MAX) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ConfigurationError(f"register width must be an integer, got {n!r}")
    if not 1 <= n <= n_max:
        raise ConfigurationError(f"register width n={n} outside [1, {n_max}]")


@dataclass(frozen=True)
class StateVector:
    """A normalized state.  The amplitude array is copied and frozen on construction."""

    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << (self.n + 1):
            raise DomainError(
                f"expected {1 << (self.n + 1)} amplitudes for n={self.n}, got {amps.shape[0]}"
            )
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > EPS_NORM:
            raise PreconditionError(f"state not normalized: |psi|^2 = {norm_sq!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, n: int, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return cls(n, amps / norm)

    @classmethod
    def basis(cls, n: int, x: int, y: int = 0) -> StateVector:
        amps = np.zeros(1 << (n + 1), dtype=np.complex128)
        amps[basis_index(BasisLabel(x, y), n)] = 1.0
        return cls(n, amps)

    @property
    def pairs(self) -> np.ndarray:
        """Read-only ``(2**n, 2)`` view: ``pairs[x, y]``."""
        return self.amplitudes.reshape(-1, 2)

    def amplitude(self, x: int, y: int) -> complex:
        return complex(self.amplitudes[basis_index(BasisLabel(x, y), self.n)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_json(self) -> dict:
        return {
            "n": int(self.n),
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, doc: dict) -> StateVector:
        amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
        return cls(int(doc["n"]), amps)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def uniform_superposition(n: int, n_max: int = N_MAX) -> StateVector:
    """Equal-weight superposition of every |x, 0>, normalized by 2**(n/2)."""
    check_width(n, n_max)
    amps = np.zeros((1 << n, 2), dtype=np.complex128)
    amps[:, 0] = 2.0 ** (-n / 2)
    return StateVector(n, amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.n != b.n:
        raise DomainError(f"width mismatch: {a.n} vs {b.n}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def projector_probability(reference: StateVector, state: StateVector) -> float:
    """Born-rule probability of the "yes" outcome of the projector |reference><reference|."""
    for s in (reference, state):
        if abs(s.norm() - 1.0) > EPS_NORM:
            raise PreconditionError("projector measurement needs normalized states")
    p = abs(inner_product(reference, state)) ** 2
    return min(p, 1.0)


def answer_distribution(state: StateVector) -> np.ndarray:
    """Marginal ``[Pr(y=0), Pr(y=1)]`` of the answer register."""
    return (np.abs(state.pairs) ** 2).sum(axis=0)
