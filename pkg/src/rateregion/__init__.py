"""Achievable rate regions of single-hop networks from chain-graph
descriptions of layered (superposition), precoded (binning), split and
time-shared random-coding schemes."""

from .network import (
    MessageId,
    NetworkSpec,
    NodeSet,
    Recomposition,
    SchemeError,
    SplitDecl,
    apply_splits,
    message,
    validate_network,
)
from .graph import (
    BINNING,
    SUPERPOSITION,
    Dag,
    ChainGraph,
    Edge,
    Factorization,
    Q,
    Rv,
    U,
    X,
    Y,
    build,
    check_assumptions,
    d_separated,
    factorize,
    orient,
)
from .expressions import (
    InfoExpr,
    MiSum,
    MiTerm,
    as_single_mi,
    combine,
    maybe_mi,
    mi,
    mi_to_expr,
    vanishes_under,
)
from .bounds import (
    DEFAULT_SVO_MODE,
    SVO_COMPLEMENT,
    SVO_MODES,
    SVO_SUBSET,
    RateIneq,
    RateSymbol,
    SubsetFamily,
    all_decoding_bounds,
    bin_rate,
    binned_set,
    code_rate,
    decoding_bounds,
    decoding_set,
    encoding_bounds,
    msg_rate,
    split_rate,
    valid_subsets,
)
from .systems import (
    DEFAULT_MAX_ROWS,
    EliminationLimitError,
    RateSystem,
    assemble,
    eliminate,
    project_to_message_rates,
    prune_numeric,
)
from .numeric import (
    DmcSpec,
    JointPmf,
    NumericRegion,
    compose_pmf,
    entropy,
    eval_expr,
    eval_mi,
    eval_msum,
    eval_region,
    validate_pmf,
)

__version__ = "0.1.0"
