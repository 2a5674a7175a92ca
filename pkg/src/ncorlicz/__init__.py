"""Noncommutative Orlicz-space moment inequalities on finite matrix algebras."""
from .errors import DimensionError, DivergentIntegralError, InvalidParameterError, RegimeError
from .orlicz import (
    CustomOrlicz,
    IndexEstimate,
    OrliczFunction,
    Power,
    PowerLog,
    PowerSin,
    delta2_constant,
    elasticity_sup,
    growth_function,
    index_integral_bound_high,
    index_integral_bound_low,
    indices,
    parse_phi,
)
from .operators import (
    StepFunction,
    TracialMatrixAlgebra,
    abs_op,
    column_square,
    column_square_moment,
    distribution,
    hermitian_parts,
    layer_cake_trace,
    lp_norm,
    orlicz_norm,
    random_operator,
    row_square,
    row_square_moment,
    singular_values,
    spectral_projection,
    trace_phi_moment,
)
from .martingale import (
    Filtration,
    Martingale,
    conditional_expectation,
    differences,
    martingale_from_final,
    random_martingale,
    square_function_col,
    square_function_row,
    stein_map,
    transform,
)
from .noise import (
    TrigPolynomial,
    block_square_moment,
    circle_phi_average,
    lacunary_embed,
    multiplier_block,
    rademacher_phi_moment,
)
from .interpolation import (
    auto_exponents,
    certified_constant,
    split,
    stein_operator,
    transform_operator,
    verify_interpolation,
    weak_type_constant,
    weak_type_ratio,
)
from .report import VerificationReport, emit_report
from .verify import (
    EnsembleConfig,
    decompose_optimal,
    ensemble_run,
    verify_bg,
    verify_khintchine,
    verify_sign_equivalence,
    verify_stein,
    verify_transform,
)

__version__ = "0.1.0"
