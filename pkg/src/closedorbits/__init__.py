"""Exact closed-orbit computations for GL_n, Sp_2n, O_2n+1 and O_2n acting on g x E."""

from .canonical import (
    ClosedSeed,
    NilpotentSeed,
    NonSplitError,
    NotNilpotentFiber,
    UnsupportedInput,
    build_closed,
    build_nilpotent,
    centralizer_decomposition,
    eta_signature,
    extract_jet_order,
    maximal_point,
    representative_from_invariants,
    semisimple_split,
)
from .classify import (
    ClassificationReport,
    DescendantReport,
    StabilizerFactor,
    descend,
    is_closed,
    mvw_stabilizer_witness,
    mvw_witness,
    predicted_stabilizer,
)
from .groups import (
    EnhancedPoint,
    GroupDescriptor,
    MvwElement,
    act,
    compose,
    cyclic_span,
    in_group,
    in_lie_algebra,
    lie_stabilizer_dim,
    orbit_dim,
    sample,
    twisting_element,
)
from .invariants import (
    InvariantVector,
    closed_orbit_equal,
    invariant_jacobian_rank,
    quotient_map,
)
from .linalg import Mat, jordan_chevalley
from .oracle import SuiteReport, classification_crosscheck, degeneration_probe, invariance_suite
from .scalar import Quad

__version__ = "0.1.0"
