"""
Configuration settings for the identification lab.
"""

import os
from typing import Optional

from dotenv import load_dotenv

from .errors import ConfigurationError

# Quadrature Configuration
QUADRATURE_CONFIG = {
    "initial_order": 40,
    "max_order": 640,
    "tolerance": 1e-9,
    "legendre_order": 64,
    "tail": 10.0,
}

# Grid Configuration
GRID_CONFIG = {
    "min_nodes": 3,
    "min_derivative_nodes": 5,
}

# Deconvolution Configuration
DECONV_CONFIG = {
    "tsvd_threshold": 1e-6,
    "v_span_sd": 4.0,
    "v_nodes": 161,
    "min_row_mass": 0.999,
    "overshoot_limit": 0.1,
    "residual_factor": 5.0,
    "residual_floor": 1e-9,
}

# Threshold-crossing kernels (binary utility maximization)
GAMMA_CONFIG = {
    "step_band": 0.1,
    "transition_halfwidth": 0.75,
}

# Coefficient identification
BETA_CONFIG = {
    "grad_fraction": 1e-4,
    "degeneracy_tol": 1e-3,
    "interior_margin": 2,
    "residual_tol": 0.05,
    "sign_slope_tol": 1e-6,
    "min_z2_nodes": 5,
    "flat_tol": 1e-10,
}

# Heterogeneity recovery
RECOVER_CONFIG = {
    "monotonicity_tol": 0.05,
}

# Games
GAME_CONFIG = {
    "truncation_depth": -8.0,
    "line_depth": 0.25,
    "edge_margin": 0.5,
    "classify_spacings": 2.0,
    "selection": 0.5,
}

# Output Configuration
OUTPUT_CONFIG = {
    "significant_digits": 12,
    "default_dir": "idlab_output",
    "manifest": "manifest.json",
    "files": {
        "ccp": "ccp.csv",
        "kernel": "h.csv",
        "deconv": "deconv.json",
        "beta": "beta.json",
        "gamma": "gamma.json",
        "fg": "fg.csv",
        "sign": "sign.json",
        "regions": "regions.json",
        "raster": "regions_raster.csv",
        "concept": "concept.json",
    },
}

THREADS_ENV = "IDLAB_THREADS"


def get_thread_cap(default: int = 1) -> int:
    """
    Read the worker cap from the environment.

    Args:
        default: Value used when IDLAB_THREADS is unset.

    Returns:
        int: Number of worker threads allowed (at least 1).
    """
    # Load environment variables from .env file if present
    load_dotenv()

    raw: Optional[str] = os.getenv(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {value}")
    return value
