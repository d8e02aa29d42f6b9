"""Correspondence refinement for multi-view image points.

Grids are float arrays of shape (points, views, 2) holding pixel
coordinates, with NaN marking a point that is not observed in a view.
Image-point indices are (point, view) tuples.
"""

from ._core import (
    Error,
    compute_errors,
    corrupt,
    gamma_rank_residual,
    generate_scene,
    lambda_rank_residual,
    main_refine,
    read_correspondences,
    recognize_outliers,
    refine_all,
    self_estimate,
    sigma_for_mean_error,
    write_correspondences,
)

__all__ = [
    "Error",
    "compute_errors",
    "corrupt",
    "gamma_rank_residual",
    "generate_scene",
    "lambda_rank_residual",
    "main_refine",
    "read_correspondences",
    "recognize_outliers",
    "refine_all",
    "self_estimate",
    "sigma_for_mean_error",
    "write_correspondences",
]
