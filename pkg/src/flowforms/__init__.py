"""Cohomology of flows on finite-dimensional form models."""

from .field import RATIONALS, CoefficientField, FieldMismatchError
from .exterior import (
    DegreeError,
    FormElement,
    GeneratorCalculus,
    ModelError,
    apply_d,
    contract,
    lie,
    operator_matrix,
    wedge,
)
from .linalg import LinearMap
from .complex import (
    FormModel,
    ModelInconsistencyError,
    SubquotientSpace,
    Subspace,
    basic_cohomology,
    cohomology_table,
    cokernel_C,
    cokernel_complex,
    contraction_homology,
    de_rham_cohomology,
    invariant_cohomology,
    top_degree_check,
    relative_H_X,
    subspace_basic,
    subspace_invariant,
    subspace_lambda_X,
)
from .models import flat_symplectic_torus, instantiate, load_model_file, sl2, torus
from .sequences import (
    FredholmData,
    SequenceReport,
    SequenceTerm,
    seven_term_sequence,
    cokernel_long_sequence,
    surface_index_profile,
    basic_h1_comparison,
    fredholm_data,
    verify_exactness,
)

__version__ = "0.1.0"

__all__ = [
    "RATIONALS",
    "CoefficientField",
    "FieldMismatchError",
    "DegreeError",
    "FormElement",
    "GeneratorCalculus",
    "ModelError",
    "apply_d",
    "contract",
    "lie",
    "operator_matrix",
    "wedge",
    "LinearMap",
    "FormModel",
    "ModelInconsistencyError",
    "SubquotientSpace",
    "Subspace",
    "basic_cohomology",
    "cohomology_table",
    "cokernel_C",
    "cokernel_complex",
    "contraction_homology",
    "de_rham_cohomology",
    "invariant_cohomology",
    "top_degree_check",
    "relative_H_X",
    "subspace_basic",
    "subspace_invariant",
    "subspace_lambda_X",
    "flat_symplectic_torus",
    "instantiate",
    "load_model_file",
    "sl2",
    "torus",
    "FredholmData",
    "SequenceReport",
    "SequenceTerm",
    "seven_term_sequence",
    "cokernel_long_sequence",
    "surface_index_profile",
    "basic_h1_comparison",
    "fredholm_data",
    "verify_exactness",
]
