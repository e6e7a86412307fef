"""Phase-decorated quantum oracles: state-vector simulation and classical comparison."""

from .classical import (
    ClassicalTranscript,
    DecisionTree,
    ToyMachine,
    build_halting_table,
    classical_query,
    min_classical_queries,
    run_machine,
    transcripts_indistinguishable,
)
from .errors import (
    ConfigurationError,
    DomainError,
    PreconditionError,
    ProtocolViolation,
    UnsupportedError,
)
from .hilbert import (
    BasisLabel,
    StateVector,
    basis_index,
    inner_product,
    projector_probability,
    uniform_superposition,
)
from .oracle import (
    MembershipTable,
    OracleSpec,
    PhaseProfile,
    apply_inverse_oracle,
    apply_oracle,
    make_phase_profile,
    verify_faithful,
)
from .protocols import DJConfig, DJOutcome, Verdict, dj_run, phase_readout, sign_flip

__version__ = "0.1.0"
