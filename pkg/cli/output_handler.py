"""
Output Handler Module - Handles saving run artifacts and the manifest
Single Responsibility: Save tables and reports to the output directory and describe them
"""

import json
import logging
import os
import platform
from typing import Any, Dict, List

import numpy as np
import pandas as pd
import pydantic
import scipy

from common import __version__
from common.config import OUTPUT_CONFIG
from common.utils import ensure_output_directory, stable_hash
from .codecs import write_csv

logger = logging.getLogger(__name__)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


class OutputHandler:
    """Handles output formatting and file operations for one run"""

    def __init__(self, output_dir: str = None):
        self.output_dir = ensure_output_directory(output_dir)
        self.saved: List[Dict[str, Any]] = []
        self.columns: Dict[str, List[str]] = {}

    def path_for(self, key: str) -> str:
        return os.path.join(self.output_dir, OUTPUT_CONFIG["files"][key])

    def save_frame(self, key: str, frame: pd.DataFrame) -> Dict[str, Any]:
        """Save a DataFrame as CSV under the configured file name"""
        filepath = self.path_for(key)
        write_csv(frame, filepath)
        self.columns[os.path.basename(filepath)] = list(frame.columns)
        return self._record(filepath)

    def save_json(self, key: str, payload: Any) -> Dict[str, Any]:
        """Save a JSON report under the configured file name"""
        filepath = self.path_for(key)
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(_jsonable(payload), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        return self._record(filepath)

    def _record(self, filepath: str) -> Dict[str, Any]:
        info = {
            "filepath": filepath,
            "filename": os.path.basename(filepath),
            "file_size_kb": os.path.getsize(filepath) / 1024,
        }
        self.saved.append(info)
        logger.info("Saved %s", filepath)
        return info

    @staticmethod
    def versions() -> Dict[str, str]:
        return {
            "idlab": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
            "pydantic": pydantic.VERSION,
        }

    def write_manifest(self, config: Dict[str, Any], grids: Dict[str, Any], diagnostics: Dict[str, Any],
                       flags: List[str], exit_status: int) -> Dict[str, Any]:
        """Echo the resolved config with versions, grid hashes, column orders, diagnostics and flags"""
        manifest = {
            "config": config,
            "config_hash": stable_hash(config),
            "versions": self.versions(),
            "grid_hashes": {name: stable_hash(grid) for name, grid in sorted(grids.items())},
            "files": sorted(info["filename"] for info in self.saved),
            "columns": self.columns,
            "diagnostics": diagnostics,
            "flags": sorted(set(flags)),
            "exit_status": exit_status,
        }
        filepath = os.path.join(self.output_dir, OUTPUT_CONFIG["manifest"])
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(_jsonable(manifest), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        logger.info("Manifest written to %s", filepath)
        return manifest

    def print_save_summary(self) -> None:
        """Print summary of saved files"""
        print(f"\n RUN SAVED: {self.output_dir}")
        for info in self.saved:
            print(f" {info['filename']}: {info['file_size_kb']:.1f} KB")
