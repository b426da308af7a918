"""Transfer operator of the Collatz map on weighted coefficient spaces."""

from .collatz_core import death_time, lemma_sequences, orbit, preimage_tree, preimages, t_step
from .eigen import EigenSpec, materialize, membership, periodic_point, verify_eigenrelation
from .ergodic_lab import (
    HypercyclicCertificate,
    MixtureShape,
    build_hypercyclic_vector,
    invariance_test,
    sample_invariant,
    verify_certificate,
    visit_frequency,
)
from .errors import BudgetExceeded, MembershipError, PredicateError
from .exact_norm import exact_iterate_norm_sq, preimage_poly_set, spectral_radius_table
from .space import CoeffVec, inner, norm_sq
from .transfer_op import apply_adjoint, apply_T, doubling_inverse_S, iterate_norm_scan
from .weights import (
    WeightDescriptor,
    boundedness_check,
    classic_bergman,
    constant,
    power_law,
    tabulated,
    weight_predicates,
)

__all__ = [
    "apply_adjoint",
    "apply_T",
    "boundedness_check",
    "BudgetExceeded",
    "build_hypercyclic_vector",
    "classic_bergman",
    "CoeffVec",
    "constant",
    "death_time",
    "doubling_inverse_S",
    "EigenSpec",
    "exact_iterate_norm_sq",
    "HypercyclicCertificate",
    "inner",
    "invariance_test",
    "iterate_norm_scan",
    "lemma_sequences",
    "materialize",
    "membership",
    "MembershipError",
    "MixtureShape",
    "norm_sq",
    "orbit",
    "periodic_point",
    "power_law",
    "PredicateError",
    "preimage_poly_set",
    "preimage_tree",
    "preimages",
    "sample_invariant",
    "spectral_radius_table",
    "t_step",
    "tabulated",
    "verify_certificate",
    "verify_eigenrelation",
    "visit_frequency",
    "weight_predicates",
    "WeightDescriptor",
]

__version__ = "0.1.0"
