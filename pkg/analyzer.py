"""
    Connects all packages, orchestrating one run from primitives to recovered structure.
"""

import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

from betaid import BetaEstimate, build_eta, check_degeneracy, identify_beta, identify_beta1_sign_multinomial
from cli.codecs import (
    RASTER_COLUMNS,
    ccp_to_frame,
    game_ccp_to_frame,
    game_kernel_to_frame,
    kernels_to_frame,
    rows_to_frame,
)
from cli.output_handler import OutputHandler
from cli.run_config import RunConfig
from common.config import BETA_CONFIG
from common.utils import parallel_map
from deconv import ChoiceKernel, DeconvDiagnostics, default_v_grid, recover_gamma, recover_h
from games import GameCCPTable, game_ccp_exact, region_map, separation_conditions
from model import CCPTable, IndexModel, ccp_empirical, ccp_exact, simulate
from numerics.grids import Grid1D
from recover import concept_report, recover_fg

logger = logging.getLogger(__name__)


class Analyzer:
    """
    Connects all packages, orchestrating the flow of data and control for one RunConfig.
    """

    def __init__(self, config: RunConfig, output: Optional[OutputHandler] = None):
        self.config = config
        self.output = output or OutputHandler(config.output_dir)
        self.status: str = "idle"  # idle, running, complete, error
        self.results: Dict[str, Any] = {}
        self.diagnostics: Dict[str, Any] = {}
        self.flags: List[str] = []
        self.grids: Dict[str, Any] = {}
        self._ccp: Optional[CCPTable] = None
        self._game_ccp: Optional[GameCCPTable] = None

    def run(self) -> Dict[str, Any]:
        """
        Runs the configured experiment.

        Returns:
            Dict[str, Any]: In-memory results keyed by stage.
        """
        runners: Dict[str, Callable[[], None]] = {
            "forward": self.run_forward,
            "recover-h": self.run_recover_h,
            "ident-beta": self.run_ident_beta,
            "recover-fg": self.run_recover_fg,
            "game-classify": self.run_game_classify,
            "full-pipeline": self.run_full_pipeline,
        }
        try:
            self.status = "running"
            logger.info("Starting %s", self.config.experiment)
            runners[self.config.experiment]()
            self.status = "complete"
            return self.results
        except Exception as e:
            self.status = "error"
            logger.error("Run failed: %s", e)
            raise

    def get_status(self) -> str:
        """
        Get the current run status.

        Returns:
            str: Current status ('idle', 'running', 'complete', 'error')
        """
        return self.status

    def exit_status(self) -> int:
        return 3 if self.flags else 0

    def write_manifest(self, exit_status: Optional[int] = None) -> Dict[str, Any]:
        """Write the manifest; `exit_status` overrides the flag-derived status."""
        return self.output.write_manifest(
            config=self.config.model_dump(mode="json"),
            grids=self.grids,
            diagnostics=self.diagnostics,
            flags=self.flags,
            exit_status=self.exit_status() if exit_status is None else exit_status,
        )

    def _flag(self, name: str) -> None:
        if name not in self.flags:
            self.flags.append(name)

    # ------------------------------------------------------------------ model runs

    @property
    def spec(self):
        return self.config.model

    def ccp_table(self) -> CCPTable:
        """Exact CCPs, or cellwise frequencies of a simulated sample when sample_size is set."""
        if self._ccp is None:
            spec = self.spec
            if self.config.sample_size:
                dataset = simulate(spec, self.config.sample_size, self.config.seed)
                self._ccp = ccp_empirical(dataset, spec)
                if self._ccp.missing().any():
                    self._flag("empty_cells")
            else:
                self._ccp = ccp_exact(spec)
            self.grids["z1_grid"] = spec.z1_grid.model_dump()
            self.grids["z2_points"] = [list(p) for p in spec.z2_points]
            self.results["ccp"] = self._ccp
        return self._ccp

    def game_table(self) -> GameCCPTable:
        if self._game_ccp is None:
            game = self.config.game
            self._game_ccp = game_ccp_exact(game, self.config.z_grids, game.w_levels[0])
            for i, grid in enumerate(self.config.z_grids):
                self.grids[f"z_grid_p{i + 1}"] = grid.model_dump()
            self.results["ccp"] = self._game_ccp
        return self._game_ccp

    def run_forward(self) -> None:
        if self.config.game is not None:
            self._forward_game()
            return
        table = self.ccp_table()
        self.output.save_frame("ccp", ccp_to_frame(table))
        self.diagnostics["ccp"] = {
            "max_row_sum_error": float(abs(table.row_sums() - 1.0)[~table.missing()].max(initial=0.0)),
            "empty_cells": int(table.missing().sum()),
        }

    def _inversion_cells(self) -> List[Tuple[str, Optional[int]]]:
        spec = self.spec
        if self.config.pooled:
            return [(w, None) for w in spec.w_levels]
        return [(w, k) for w in spec.w_levels for k in range(len(spec.z2_points))]

    def recover_kernels(self, index: IndexModel) -> List[Tuple[ChoiceKernel, DeconvDiagnostics]]:
        """Invert every (w, z2 point) cell, or every w with z2 points pooled."""
        spec, table = self.spec, self.ccp_table()
        scales = [spec.kernel_scale(k) for k in range(len(spec.z2_points))]

        def invert(cell):
            w, k = cell
            return recover_h(table, index, w=w, z2_index=k or 0, v_grid=self.config.v_grid,
                             strategy=self.config.regularization, pooled=k is None,
                             smoothing=self.config.smoothing, z2_scales=scales)

        solved = parallel_map(invert, self._inversion_cells())
        for (w, k), (h, diag) in zip(self._inversion_cells(), solved):
            key = f"w={w},z2={'pooled' if k is None else k}"
            self.diagnostics.setdefault("deconv", {})[key] = diag.to_dict()
            self.grids[f"v_grid[{key}]"] = h.v_grid.model_dump()
            for flag in diag.flags:
                self._flag(flag)
        return solved

    def run_recover_h(self, index: Optional[IndexModel] = None) -> None:
        if self.config.game is not None:
            self._classify_game(save_kernel=True, classify=False)
            return
        index = index or self.spec.index
        solved = self.recover_kernels(index)
        kernels = [h for h, _ in solved]
        self.results["kernels"] = kernels
        self.output.save_frame("kernel", kernels_to_frame(kernels))
        self.output.save_json("deconv", self.diagnostics["deconv"])
        if self.spec.family == "binary":
            self._gamma(kernels)

    def _gamma(self, kernels: List[ChoiceKernel]) -> None:
        estimates = {}
        for h in kernels:
            key = f"w={h.w},z2={'pooled' if h.z2_index is None else h.z2_index}"
            estimates[key] = recover_gamma(h)[h.w].to_dict()
        self.results["gamma"] = estimates
        self.diagnostics["gamma"] = estimates
        self.output.save_json("gamma", estimates)

    def _default_y_star(self):
        if self.config.y_star is not None:
            return self.config.y_star
        return 1 if self.spec.family == "binary" else self.ccp_table().outcomes[0]

    def run_ident_beta(self) -> Dict[str, BetaEstimate]:
        spec, table = self.spec, self.ccp_table()
        y_star = self._default_y_star()
        estimates: Dict[str, BetaEstimate] = {}
        report: Dict[str, Any] = {}
        for w in spec.w_levels:
            surface = build_eta(table, y_star, w, self.config.eta_direction)
            degeneracy = check_degeneracy(surface)
            if degeneracy.degenerate:
                self._flag("degenerate")
                report[w] = {"degeneracy": degeneracy.to_dict()}
                continue
            estimate = identify_beta(surface, spec.index.sign_info[w])
            for flag in estimate.flags:
                self._flag(flag)
            estimates[w] = estimate
            report[w] = estimate.to_dict()
        self.results["beta"] = estimates
        self.diagnostics["beta"] = report
        self.output.save_json("beta", report)

        if spec.family != "binary":
            signs = {w: identify_beta1_sign_multinomial(table, w).to_dict() for w in spec.w_levels}
            if any(s["abstained"] for s in signs.values()):
                self._flag("sign_abstained")
            self.diagnostics["sign"] = signs
            self.output.save_json("sign", signs)
        return estimates

    def run_recover_fg(self, index: Optional[IndexModel] = None) -> None:
        spec = self.spec
        index = index or spec.index
        if "kernels" not in self.results:
            self.run_recover_h(index)
        kernels: List[ChoiceKernel] = self.results["kernels"]
        rows, summaries = [], {}
        for w in spec.w_levels:
            mine = [h for h in kernels if h.w == w]
            if spec.family == "binary":
                loadings = [[float(spec.orientation)] for _ in mine]
            else:
                loadings = [spec.orientation * spec.loadings(h.z2_index) for h in mine]
            rays = recover_fg(mine, loadings, w)
            rows.extend(rays.rows())
            summaries[w] = rays.summary()
        self.results["fg"] = summaries
        self.diagnostics["fg"] = summaries
        self.output.save_frame("fg", rows_to_frame(rows))

    def _estimated_index(self, estimates: Dict[str, BetaEstimate]) -> IndexModel:
        index = self.spec.index
        for w, est in estimates.items():
            index = index.with_coefficients(w, est.beta0, est.beta1)
        kept = [w for w in index.w_levels if w not in estimates]
        if kept:
            logger.warning("Using the configured index law for w levels %s", kept)
            self.diagnostics["index_source"] = {w: "configured" for w in kept}
        return index

    def _can_identify_beta(self) -> bool:
        table = self.ccp_table()
        return len(table.z2_points) >= BETA_CONFIG["min_z2_nodes"]

    def run_full_pipeline(self) -> None:
        if self.config.game is not None:
            self._forward_game()
            self.run_game_classify()
            return
        self.run_forward()
        index = self.spec.index
        if self._can_identify_beta():
            index = self._estimated_index(self.run_ident_beta())
        else:
            logger.warning("Too few z2 points to identify beta; deconvolving with the configured index")
        self.run_recover_h(index)
        self.run_recover_fg(index)

    # ------------------------------------------------------------------ game runs

    def _game_v_grids(self) -> List[Grid1D]:
        if self.config.v_grids is not None:
            return list(self.config.v_grids)
        game, w = self.config.game, self.config.game.w_levels[0]
        return [default_v_grid(game.index[i], w, self.config.z_grids[i]) for i in range(2)]

    def _forward_game(self) -> None:
        game = self.config.game
        w = game.w_levels[0]
        table = self.game_table()
        rmap = region_map(game, w)
        grids = self._game_v_grids()
        self.output.save_frame("ccp", game_ccp_to_frame(table))
        self.output.save_json("regions", {
            "region_map": rmap.to_dict(),
            "separation_conditions": separation_conditions(game, w),
        })
        self.output.save_frame("raster", rows_to_frame(rmap.raster(*grids), RASTER_COLUMNS))
        self.results["regions"] = rmap

    def _classify_game(self, save_kernel: bool, classify: bool) -> None:
        game = self.config.game
        table = self.game_table()
        grids = self._game_v_grids()
        h2, diag = recover_h(table, list(game.index), v_grid=grids, strategy=self.config.regularization,
                             smoothing=self.config.smoothing)
        for i, grid in enumerate(grids):
            self.grids[f"v_grid_p{i + 1}"] = grid.model_dump()
        self.diagnostics["deconv"] = {f"w={h2.w}": diag.to_dict()}
        for flag in diag.flags:
            self._flag(flag)
        self.results["kernels"] = [h2]
        if save_kernel:
            self.output.save_frame("kernel", game_kernel_to_frame(h2))
            self.output.save_json("deconv", self.diagnostics["deconv"])
        if classify:
            report = concept_report(h2, self.config.outcome_pair)
            for flag in report.flags:
                self._flag(flag)
            self.results["concept"] = report
            self.diagnostics["concept"] = report.to_dict()
            self.output.save_json("concept", report.to_dict())

    def run_game_classify(self) -> None:
        self._classify_game(save_kernel=True, classify=True)
