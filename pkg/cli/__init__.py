"""
Batch front door: run configuration, tabular codecs, artifact output and the command line
"""

from .run_config import RunConfig, EXPERIMENTS
from .output_handler import OutputHandler
from .main import main, build_parser, EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL

__version__ = "1.0.0"
__all__ = [
    "RunConfig",
    "EXPERIMENTS",
    "OutputHandler",
    "main",
    "build_parser",
    "EXIT_OK",
    "EXIT_INPUT",
    "EXIT_NUMERICAL",
]
