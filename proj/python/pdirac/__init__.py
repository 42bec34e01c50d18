"""Spectral toolkit for p-Dirac operators and nonlinear Dirac-type
variational problems on flat spin tori."""

from ._core import (  # noqa: F401
    Classification,
    CriticalPoint,
    DiracOperator,
    EigenConfig,
    EigenPair,
    Energy,
    GammaSet,
    MonotoneResult,
    Nonlinearity,
    PointKind,
    PsReport,
    SolveConfig,
    SpectrumEntry,
    SpinorField,
    TailResult,
    TorusModel,
    TraceEntry,
    TrendReport,
    __version__,
    build_gamma,
    check_relations,
    classify,
    constant_branch,
    constant_branch_point,
    dual_fountain_sequence,
    dual_fountain_trend,
    field_from_array,
    find_e,
    fountain_sequence,
    fountain_trend,
    global_minimize,
    hcal,
    hcal_prime,
    inner,
    load_field,
    lp_norm,
    ls_sequence,
    min_eigen,
    monotone_inequality_check,
    mountain_pass,
    ps_diagnostic,
    random_field,
    rayleigh,
    rim_estimate,
    save_field,
    spinor_dimension,
    tail_embedding_constant,
    weak_eigen_check,
    weak_solution_check,
)
