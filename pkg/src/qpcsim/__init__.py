"""Simulation and verification laboratory for three-party quantum private
comparison on the maximally entangled six-qubit state."""

from .statevec import (
    BellOutcome,
    MeasurementRecord,
    OrthonormalBasis,
    StateVector,
    apply_unitary,
    basis_state,
    bell_basis,
    bell_state,
    inner,
    measure,
    reorder,
    tensor,
    x_basis,
    z_basis,
)
from .bpb import (
    IdentityId,
    TripleTerm,
    TwoBits,
    bell_triple_distribution,
    encode,
    gamma_basis,
    identity_suite,
    key_relation_table_mismatches,
    make_psi6qb,
    verify_identity,
)
from .channels import (
    ChannelModel,
    DeliveryReport,
    honest_qber,
    ideal,
    lossy,
    noisy,
    parse_channel_spec,
    tapped,
    transmit,
)
from .protocol import (
    Session,
    SessionConfig,
    SessionReport,
    plaintext_comparison,
    run_session,
)
from .adversary import (
    ConstraintClasses,
    FakeBellProduct,
    FakeSplitForm,
    InterceptResend,
    MeasureResend,
    ProbeModel,
    derive_probe_constraints,
    detection_probability_formula,
    key_inference_analysis,
    probe_attack,
)

__version__ = "0.1.0"
