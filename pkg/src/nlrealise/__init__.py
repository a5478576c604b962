"""Exact realisation maps from Lie superalgebras into operator series, and L-infinity brackets from DGLAs."""
from .algebra import (
    BasisElement,
    Decomposition,
    DecompositionError,
    Element,
    MalformedElementError,
    SuperAlgebra,
    ValidationReport,
    Violation,
    validate_superalgebra,
)
from .linfty import (
    DGLA,
    DGLAError,
    LeibnizTable,
    LInftyStructure,
    bernoulli_minus,
    check_linfty,
    coefficient_Cp,
    embed_dgla,
    getzler_brackets,
    leibniz_identity_holds,
    leibniz_to_dgla,
    leibniz_to_theta,
    realised_brackets,
)
from .operators import (
    ArityError,
    CompositionError,
    Operator,
    OperatorSum,
    SymOperator,
    bracket,
    bullet,
    circ,
    evaluate_operator,
    graded_symmetrize,
    super_commutator,
)
from .realisation import (
    Realisation,
    check_homomorphism,
    realise,
    realise_closed,
    realise_recursive,
    realise_tilde,
)
from .specfile import SpecFile, SpecSyntaxError, parse_spec, render_spec

__version__ = "0.1.0"
