"""The two quantum procedures run against a phase-decorated oracle.

``dj_run`` is the double-oracle promise test: prepare the uniform
superposition over |x, 0>, call the oracle, apply the middle operation, call
the oracle (or its inverse) again, then measure the projector onto the start
state.  ``phase_readout`` recovers one bit of a function hidden purely in the
oracle phases with a single call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, PreconditionError, ProtocolViolation
from .hilbert import (
    EPS_VERDICT,
    N_MAX,
    StateVector,
    check_width,
    inner_product,
    projector_probability,
    uniform_superposition,
)
from .oracle import OracleSpec, apply_inverse_oracle, apply_oracle


class MiddleOp(str, Enum):
    SIGN_FLIP = "sign_flip"
    IDENTITY = "identity"


class SecondCall(str, Enum):
    FORWARD_U = "forward_U"
    INVERSE_U = "inverse_U"


class Verdict(str, Enum):
    A = "A"
    B = "B"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DJConfig:
    middle_op: MiddleOp = MiddleOp.SIGN_FLIP
    second_call: SecondCall = SecondCall.FORWARD_U
    regime: str = ""

    def __post_init__(self):
        try:
            object.__setattr__(self, "middle_op", MiddleOp(self.middle_op))
            object.__setattr__(self, "second_call", SecondCall(self.second_call))
        except ValueError as exc:
            raise DomainError(str(exc)) from exc


@dataclass(frozen=True)
class DJOutcome:
    inner: complex
    probability: float
    verdict: Verdict
    oracle_calls: int = 2
    final_state: StateVector | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class ReadoutOutcome:
    bit: int
    inner: complex
    probability: float
    oracle_calls: int = 1
    final_state: StateVector | None = field(default=None, repr=False, compare=False)


def classify(probability: float, eps: float = EPS_VERDICT) -> Verdict:
    if probability > 1.0 - eps:
        return Verdict.A
    if probability < eps:
        return Verdict.B
    return Verdict.INCONCLUSIVE


def sign_flip(state: StateVector) -> StateVector:
    """|x, y> -> (-1)^y |x, y>."""
    pairs = state.pairs.copy()
    pairs[:, 1] *= -1
    return StateVector(state.n, pairs)


def dj_run(oracle: OracleSpec, config: DJConfig = DJConfig(), n_max: int = N_MAX) -> DJOutcome:
    psi = uniform_superposition(oracle.n, n_max)
    state = apply_oracle(oracle, psi)
    if config.middle_op is MiddleOp.SIGN_FLIP:
        state = sign_flip(state)
    if config.second_call is SecondCall.FORWARD_U:
        state = apply_oracle(oracle, state)
    else:
        state = apply_inverse_oracle(oracle, state)
    inner = inner_product(psi, state)
    probability = projector_probability(psi, state)
    return DJOutcome(inner, probability, classify(probability), 2, state)


def readout_state(n: int, z: int, x: int) -> StateVector:
    """(|z, 0> + |x, 0>) / sqrt(2)."""
    if x == z:
        raise DomainError(f"readout needs x != z (both are {x})")
    for q in (x, z):
        if not 0 <= q < (1 << n):
            raise DomainError(f"query {q} out of range for n={n}")
    amps = np.zeros((1 << n, 2), dtype=np.complex128)
    amps[z, 0] = amps[x, 0] = 2.0 ** -0.5
    return StateVector(n, amps)


def readout_run(oracle: OracleSpec, z: int, x: int, h=None, n_max: int = N_MAX) -> ReadoutOutcome:
    """Single-call readout of h(x) with full measurement detail.

    ``h`` is optional and used only to validate the h(z) = 1 promise; without
    it the promise is the caller's obligation.
    """
    n = oracle.n
    check_width(n, n_max)
    if oracle.membership.size != 0:
        raise PreconditionError("phase readout assumes trivial membership f = 0")
    if h is not None and int(np.asarray(h).reshape(-1)[z]) != 1:
        raise PreconditionError(f"special string z={z} must satisfy h(z) = 1")
    psi = readout_state(n, z, x)
    chi = apply_oracle(oracle, psi)
    inner = inner_product(psi, chi)
    probability = projector_probability(psi, chi)
    verdict = classify(probability)
    if verdict is Verdict.INCONCLUSIVE:
        raise ProtocolViolation(
            f"readout probability {probability:.6g} for x={x} is in neither band; "
            "oracle phases are not a binary function encoding"
        )
    return ReadoutOutcome(1 if verdict is Verdict.A else 0, inner, probability, 1, chi)


def phase_readout(oracle: OracleSpec, z: int, x: int, h=None) -> int:
    return readout_run(oracle, z, x, h).bit


def recover_function(oracle: OracleSpec, z: int) -> np.ndarray:
    """Read h at every x != z; h(z) = 1 is known by promise."""
    h = np.ones(1 << oracle.n, dtype=np.uint8)
    for x in range(1 << oracle.n):
        if x != z:
            h[x] = phase_readout(oracle, z, x)
    return h
