"""Python bindings for the hsevo core."""

from ._hsevo import (
    ConfigError,
    EmptyArchiveError,
    Error,
    ExtractionError,
    InsufficientArchiveError,
    UndefinedSimilarityError,
    aco_solve,
    bpo_seed_priority,
    cdi,
    cli,
    cluster,
    cosine_similarity,
    embed,
    entropy,
    exact_op,
    exact_tsp,
    extract_code,
    extract_code_and_ranges,
    gen_bpo,
    gen_op,
    gen_tsp,
    gls_solve,
    harmony_search,
    mst,
    mt_lower_bound,
    normalize,
    op_seed_heuristic,
    pack_online,
    swdi,
    tsp_seed_update,
)

__all__ = [name for name in dir() if not name.startswith("_")]
