"""Low-rank approximate matrix multiplication with mixed bit-width
integer quantization, plus evaluators for the matching error bounds and a
benchmark CLI.
"""

from ._kernels import backend_name
from .bounds import (
    BoundInputs,
    lramm_general_bound,
    lramm_specific_bound,
    qgemm_bound,
    qsvd_bound,
    quant_matrix_bound,
    quant_scalar_var_bound,
    rsvd_error_bound,
    spectrum_shape_factor,
    svd_trunc_bound,
)
from .errors import (
    DegenerateDenominatorError,
    FormatError,
    LrammError,
    OracleLimitError,
    OverflowRiskError,
    ParameterError,
    ShapeError,
)
from .matcore import (
    BINARY01,
    EXPONENTIAL1,
    NORMAL01,
    UNIFORM01,
    Distribution,
    SvdFactors,
    frobenius_norm,
    gemm,
    generate,
    load_matrix,
    load_matrix_csv,
    oracle_svd,
    relative_error,
    save_matrix,
    save_matrix_csv,
    spectral_norm,
)
from .pipeline import (
    CostModel,
    ErrorReport,
    LrammParams,
    StageTimings,
    cost_model,
    evaluate,
    lramm,
    preset,
)
from .quant import (
    QuantizedMatrix,
    bit_cap,
    dequantize,
    integer_matmul,
    load_quantized,
    qgemm,
    quantize,
    save_quantized,
)
from .rsvd import (
    RsvdParams,
    load_svd_factors,
    quantized_svd_approx,
    range_finder,
    rsvd,
    save_svd_factors,
    truncate_svd,
)

__version__ = "0.1.0"
