"""
Utility functions shared by the lab packages
"""

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Tuple, TypeVar, Union

from .config import OUTPUT_CONFIG, get_thread_cap

T = TypeVar("T")
R = TypeVar("R")

Label = Union[int, Tuple[int, ...]]


def ensure_output_directory(output_dir: str = None) -> str:
    """Ensure the output directory exists and is writable"""
    if output_dir is None:
        output_dir = OUTPUT_CONFIG["default_dir"]
    if not os.path.exists(output_dir):
        os.makedirs(output_dir)
    if not os.access(output_dir, os.W_OK):
        raise PermissionError(f"Output directory is not writable: {output_dir}")
    return output_dir


def format_float(value: float, digits: int = None) -> str:
    """Print a float with the configured number of significant digits"""
    if digits is None:
        digits = OUTPUT_CONFIG["significant_digits"]
    return f"{value:.{digits}g}"


def label_to_text(label: Label) -> str:
    """Render an outcome label: 1 -> '1', (1, 0) -> '(1,0)'"""
    if isinstance(label, tuple):
        return "(" + ",".join(str(int(x)) for x in label) + ")"
    return str(int(label))


def text_to_label(text: str) -> Label:
    """Inverse of label_to_text"""
    text = str(text).strip()
    if text.startswith("("):
        inner = text.strip("()")
        return tuple(int(x) for x in inner.split(",") if x != "")
    return int(text)


def stable_hash(payload: Any) -> str:
    """sha256 of the canonical JSON rendering of payload"""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def parallel_map(func: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Map func over items with at most IDLAB_THREADS workers, preserving order"""
    items = list(items)
    workers = min(get_thread_cap(), max(len(items), 1))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
