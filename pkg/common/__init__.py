"""
Shared plumbing for the identification lab: errors, configuration and small utilities
"""

from .errors import (
    IdlabError,
    InputError,
    ConfigurationError,
    NumericalError,
    QuadratureError,
    KernelMassError,
    SolverError,
    IdentificationError,
    DetectionError,
    MonotonicityError,
)
from .utils import (
    Label,
    ensure_output_directory,
    format_float,
    label_to_text,
    text_to_label,
    stable_hash,
    parallel_map,
)

__version__ = "1.0.0"
__all__ = [
    "IdlabError",
    "InputError",
    "ConfigurationError",
    "NumericalError",
    "QuadratureError",
    "KernelMassError",
    "SolverError",
    "IdentificationError",
    "DetectionError",
    "MonotonicityError",
    "Label",
    "ensure_output_directory",
    "format_float",
    "label_to_text",
    "text_to_label",
    "stable_hash",
    "parallel_map",
]
