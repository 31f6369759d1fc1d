"""Stability-aware pass metrics (Pass@k, G-Pass@k_tau, mG-Pass@k)."""

from ._core import (
    __version__,
    compute_report,
    drop_percentage,
    format_percent,
    g_pass_at_k,
    g_pass_at_k_tau,
    mg_pass_at_k,
    parse_verdict,
    pass_at_k,
    render_judge_prompt,
    tau_slope,
    threshold_count,
    true_estimator_std,
    true_expected_g_pass,
    unbiasedness_study,
)

__all__ = [
    "__version__",
    "compute_report",
    "drop_percentage",
    "format_percent",
    "g_pass_at_k",
    "g_pass_at_k_tau",
    "mg_pass_at_k",
    "parse_verdict",
    "pass_at_k",
    "render_judge_prompt",
    "tau_slope",
    "threshold_count",
    "true_estimator_std",
    "true_expected_g_pass",
    "unbiasedness_study",
]
