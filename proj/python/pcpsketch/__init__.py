"""Projection-cost-preserving sketches: construction, certificates, probe audits and solvers."""

from ._core import (
    PcpError,
    amm_error,
    best_rank_k_projection,
    certify,
    exhaustive_kmeans,
    frobenius_preservation_error,
    gen_synthetic,
    jl_moment,
    leverage_residual_probs,
    lloyd_kmeans,
    pcp_report,
    projection_cost,
    ridge_scores,
    sketch,
    solve,
    spectral_approx_error,
    subspace_embedding_error,
    svd,
    tail_index_p,
)

__all__ = [
    "PcpError",
    "amm_error",
    "best_rank_k_projection",
    "certify",
    "exhaustive_kmeans",
    "frobenius_preservation_error",
    "gen_synthetic",
    "jl_moment",
    "leverage_residual_probs",
    "lloyd_kmeans",
    "pcp_report",
    "projection_cost",
    "ridge_scores",
    "sketch",
    "solve",
    "spectral_approx_error",
    "subspace_embedding_error",
    "svd",
    "tail_index_p",
]
