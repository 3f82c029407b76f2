import numpy as np
import pytest

from cli.codecs import (
    CCP_COLUMNS,
    KERNEL_COLUMNS,
    ccp_from_frame,
    ccp_to_frame,
    game_kernel_from_frame,
    game_kernel_to_frame,
    kernels_from_frame,
    kernels_to_frame,
    read_csv,
    write_csv,
)
from common.utils import label_to_text, text_to_label
from deconv import ChoiceKernel
from factories import binary_spec
from games import game_kernel
from model import ccp_exact
from numerics import Grid1D


@pytest.mark.parametrize("label,text", [(0, "0"), (2, "2"), ((1, 0), "(1,0)"), ((0, 1, 1), "(0,1,1)")])
def test_label_text(label, text):
    assert label_to_text(label) == text
    assert text_to_label(text) == label


def test_ccp_table_survives_csv(tmp_path):
    spec = binary_spec(0.5, 1.0, z2_values=(0.5, 1.5))
    table = ccp_exact(spec)
    path = tmp_path / "ccp.csv"
    write_csv(ccp_to_frame(table), str(path))
    frame = read_csv(str(path))
    assert list(frame.columns) == CCP_COLUMNS
    back = ccp_from_frame(frame, spec.z2_points)
    assert back.outcomes == table.outcomes
    assert back.z1_grid == table.z1_grid
    np.testing.assert_allclose(back.values, table.values, rtol=1e-11, atol=1e-12)


def test_kernels_survive_csv(tmp_path):
    grid = Grid1D(lo=-2.3, hi=1.7, n=41)
    inside = np.linspace(0.05, 0.95, 41)
    kernels = [
        ChoiceKernel((0, 1), "0", (grid,), np.stack([1.0 - inside, inside]), z2_index=0),
        ChoiceKernel((0, 1), "0", (grid,), np.stack([inside, 1.0 - inside]), z2_index=None),
    ]
    path = tmp_path / "h.csv"
    write_csv(kernels_to_frame(kernels), str(path))
    frame = read_csv(str(path))
    assert list(frame.columns) == KERNEL_COLUMNS
    back = kernels_from_frame(frame)
    assert [h.z2_index for h in back] == [0, None]
    for original, restored in zip(kernels, back):
        assert restored.v_grid.lo == pytest.approx(grid.lo, rel=1e-11)
        np.testing.assert_allclose(restored.values, original.values, rtol=1e-11)


def test_game_kernel_survives_csv(tmp_path, example_game):
    grids = [Grid1D(lo=-2.0, hi=2.0, n=9), Grid1D(lo=-1.0, hi=3.0, n=5)]
    h2 = game_kernel(example_game("collusion"), "0", grids)
    path = tmp_path / "h2.csv"
    write_csv(game_kernel_to_frame(h2), str(path))
    back = game_kernel_from_frame(read_csv(str(path)))
    assert back.outcomes == h2.outcomes
    assert back.v_grids == h2.v_grids
    np.testing.assert_array_equal(back.values, h2.values)


def test_csv_output_is_byte_stable(tmp_path):
    frame = ccp_to_frame(ccp_exact(binary_spec(z1=(-1.0, 1.0, 9))))
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(frame, str(first))
    write_csv(frame, str(second))
    assert first.read_bytes() == second.read_bytes()
    assert b"\r\n" not in first.read_bytes()
