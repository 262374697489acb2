"""Economic-complexity indices for venture-capital specialization networks."""

from .complexity import (
    ComplexityReport,
    EigenResult,
    complexity_report,
    compute_etgci,
    compute_gci,
    cooccurrence,
    diversity,
    rank,
    top_eigenpairs,
    ubiquity,
)
from .errors import (
    ComplexityError,
    ConvergenceError,
    DegenerateSpectrumError,
    GeoeconError,
    IngestError,
    SpecializationError,
    StrategyError,
)
from .ingest import (
    ClassificationAssignment,
    DealRecord,
    FilterParams,
    InvestmentSlice,
    InvestmentTensor,
    Taxonomy,
    aggregate,
    build_tensor,
    load_taxonomy,
    parse_classifications,
    parse_deals,
    select_firms,
    threshold_classifications,
)
from .specialization import (
    RVAMatrix,
    SpecializationMatrix,
    binarize,
    compute_rva,
    round_up_variant,
    specialization_matrix,
    windowed_variant,
)
from .strategy import (
    bloc_experiment,
    bloc_matrix,
    find_ssset,
    relatedness,
    simulate_addition,
)

__version__ = "0.1.0"
