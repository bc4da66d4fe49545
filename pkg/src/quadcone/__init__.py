"""quadcone: quadratic cones in C^n, their normal forms, and extension verdicts."""

from .quadform import (
    ConeError,
    ConeSample,
    HermitianSignature,
    InsufficientSamples,
    NonHomogeneous,
    NonReal,
    QuadraticCone,
    RealSignature,
    canonical_sign,
    decompose_poly,
    decompose_real_form,
    evaluate,
    evaluate_many,
    hermitian_signature,
    real_form_matrix,
    real_signature,
    sample_cone,
    sample_points,
)
from .reduction import (
    E_HERM,
    DetInvariants,
    So11Element,
    TakagiFactorization,
    factor_preserver,
    det_invariants,
    sl2_reduce_sym,
    so11_zero_diag,
    takagi2,
)
from .normalform import (
    CHOFVAR,
    DegeneracyReport,
    NormalFormResult,
    NormalFormType,
    apply_change,
    classify2,
    normalize_hermitian,
    render_cone,
    uniqueness_certificate,
)

__version__ = "0.1.0"
