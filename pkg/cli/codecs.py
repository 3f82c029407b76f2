"""
Codecs Module - tabular encodings of lab objects
Single Responsibility: turn tables, kernels, rasters and ray CDFs into DataFrames and back
"""

from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from common.config import OUTPUT_CONFIG
from common.errors import InputError
from common.utils import label_to_text, text_to_label
from deconv.kernel import ChoiceKernel
from games.forward import GameCCPTable
from model.forward import CCPTable
from numerics.grids import Grid1D

CCP_COLUMNS = ["y", "w", "z2_index", "z1", "mu"]
GAME_CCP_COLUMNS = ["y", "w", "z_p1", "z_p2", "mu"]
KERNEL_COLUMNS = ["y", "w", "z2_index", "v", "h"]
GAME_KERNEL_COLUMNS = ["y", "w", "v1", "v2", "h"]
RASTER_COLUMNS = ["v1", "v2", "y", "h"]
POOLED = -1


def float_format() -> str:
    return f"%.{OUTPUT_CONFIG['significant_digits']}g"


def write_csv(frame: pd.DataFrame, path: str) -> None:
    frame.to_csv(path, index=False, float_format=float_format(), lineterminator="\n")


def read_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"y": str, "w": str})


def _grid_from_nodes(values: Sequence[float]) -> Grid1D:
    nodes = np.unique(np.asarray(values, dtype=np.float64))
    return Grid1D(lo=float(nodes[0]), hi=float(nodes[-1]), n=int(nodes.size))


def ccp_to_frame(table: CCPTable) -> pd.DataFrame:
    n_y, n_w, n_z2, n_z1 = table.values.shape
    y, w, k, z = np.meshgrid(np.arange(n_y), np.arange(n_w), np.arange(n_z2), np.arange(n_z1), indexing="ij")
    return pd.DataFrame({
        "y": [label_to_text(table.outcomes[i]) for i in y.ravel()],
        "w": [table.w_levels[i] for i in w.ravel()],
        "z2_index": k.ravel(),
        "z1": table.z1_grid.nodes[z.ravel()],
        "mu": table.values.ravel(),
    }, columns=CCP_COLUMNS)


def ccp_from_frame(frame: pd.DataFrame, z2_points: Sequence[Sequence[float]]) -> CCPTable:
    """Rebuild a CCPTable; z₂ point coordinates come from the manifest."""
    missing = set(CCP_COLUMNS) - set(frame.columns)
    if missing:
        raise InputError(f"CCP frame lacks columns {sorted(missing)}")
    outcomes = list(dict.fromkeys(frame["y"]))
    levels = list(dict.fromkeys(frame["w"].astype(str)))
    grid = _grid_from_nodes(frame["z1"])
    values = np.full((len(outcomes), len(levels), len(z2_points), grid.n), np.nan)
    yi = frame["y"].map({y: i for i, y in enumerate(outcomes)}).to_numpy()
    wi = frame["w"].astype(str).map({w: i for i, w in enumerate(levels)}).to_numpy()
    zi = np.rint((frame["z1"].to_numpy() - grid.lo) / grid.spacing).astype(int)
    values[yi, wi, frame["z2_index"].to_numpy(dtype=int), zi] = frame["mu"].to_numpy()
    return CCPTable(tuple(text_to_label(y) for y in outcomes), tuple(levels), tuple(map(tuple, z2_points)),
                    grid, values)


def game_ccp_to_frame(table: GameCCPTable) -> pd.DataFrame:
    n_y, n1, n2 = table.values.shape
    y, a, b = np.meshgrid(np.arange(n_y), np.arange(n1), np.arange(n2), indexing="ij")
    return pd.DataFrame({
        "y": [label_to_text(table.outcomes[i]) for i in y.ravel()],
        "w": table.w,
        "z_p1": table.z_grids[0].nodes[a.ravel()],
        "z_p2": table.z_grids[1].nodes[b.ravel()],
        "mu": table.values.ravel(),
    }, columns=GAME_CCP_COLUMNS)


def kernels_to_frame(kernels: Sequence[ChoiceKernel]) -> pd.DataFrame:
    """One-index kernels stacked in the order given; pooled kernels carry z2_index -1."""
    frames = []
    for h in kernels:
        n_y, n_v = h.values.shape
        y, v = np.meshgrid(np.arange(n_y), np.arange(n_v), indexing="ij")
        frames.append(pd.DataFrame({
            "y": [label_to_text(h.outcomes[i]) for i in y.ravel()],
            "w": h.w,
            "z2_index": POOLED if h.z2_index is None else h.z2_index,
            "v": h.v_grid.nodes[v.ravel()],
            "h": h.values.ravel(),
        }, columns=KERNEL_COLUMNS))
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=KERNEL_COLUMNS)


def kernels_from_frame(frame: pd.DataFrame) -> List[ChoiceKernel]:
    kernels = []
    for (w, k), block in frame.groupby(["w", "z2_index"], sort=False):
        outcomes = list(dict.fromkeys(block["y"]))
        grid = _grid_from_nodes(block["v"])
        values = np.stack([block.loc[block["y"] == y, "h"].to_numpy() for y in outcomes])
        kernels.append(ChoiceKernel(tuple(text_to_label(y) for y in outcomes), str(w), (grid,), values,
                                    z2_index=None if int(k) == POOLED else int(k)))
    return kernels


def game_kernel_to_frame(h: ChoiceKernel) -> pd.DataFrame:
    n_y, n1, n2 = h.values.shape
    y, a, b = np.meshgrid(np.arange(n_y), np.arange(n1), np.arange(n2), indexing="ij")
    return pd.DataFrame({
        "y": [label_to_text(h.outcomes[i]) for i in y.ravel()],
        "w": h.w,
        "v1": h.v_grids[0].nodes[a.ravel()],
        "v2": h.v_grids[1].nodes[b.ravel()],
        "h": h.values.ravel(),
    }, columns=GAME_KERNEL_COLUMNS)


def game_kernel_from_frame(frame: pd.DataFrame) -> ChoiceKernel:
    outcomes = list(dict.fromkeys(frame["y"]))
    g1, g2 = _grid_from_nodes(frame["v1"]), _grid_from_nodes(frame["v2"])
    values = np.stack([frame.loc[frame["y"] == y, "h"].to_numpy().reshape(g1.n, g2.n) for y in outcomes])
    return ChoiceKernel(tuple(text_to_label(y) for y in outcomes), str(frame["w"].iloc[0]), (g1, g2), values)


def rows_to_frame(rows: List[Dict], columns: Sequence[str] = None) -> pd.DataFrame:
    frame = pd.DataFrame(rows)
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    return frame
