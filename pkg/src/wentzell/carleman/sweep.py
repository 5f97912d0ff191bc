"""(s, lambda) sweeps of the Carleman ratio over a family of test functions."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError
from ..geometry import CarlemanParams
from ..pde.io import write_csv
from .sides import ROW_HEADER, CarlemanEntry, CarlemanQuadrature, QuadratureResolution, carleman_sides

log = logging.getLogger(__name__)


@dataclass
class SweepResult:
    entries: list
    s_grid: np.ndarray
    lam_grid: np.ndarray
    max_ratio: np.ndarray  # (len(s_grid), len(lam_grid)), max over the family
    s0: float
    lam0: float
    C: float
    delta_gt_d: bool

    def write(self, path):
        return write_csv(path, ROW_HEADER, [e.row() for e in self.entries])

    def summary(self) -> dict:
        return {"s0": self.s0, "lambda0": self.lam0, "C": self.C,
                "delta_gt_d": self.delta_gt_d, "max_ratio": self.max_ratio.tolist(),
                "s_grid": self.s_grid.tolist(), "lambda_grid": self.lam_grid.tolist()}


def empirical_constants(table, s_grid, lam_grid, tol=1.05):
    """Smallest grid corner ``(s0, lam0)`` past which the ratio stays below
    ``tol`` times its value at the largest ``(s, lam)``; ``C`` is the max there."""
    ref = table[-1, -1]
    best = None
    for i in range(len(s_grid)):
        for j in range(len(lam_grid)):
            block = table[i:, j:]
            if np.all(np.isfinite(block)) and np.all(block <= tol * ref):
                key = (i + j, i)
                if best is None or key < best[0]:
                    best = (key, i, j)
    if best is None:
        return float(s_grid[-1]), float(lam_grid[-1]), float(ref)
    _, i, j = best
    return float(s_grid[i]), float(lam_grid[j]), float(np.max(table[i:, j:]))


def carleman_sweep(template: CarlemanParams, coeffs, tests, s_grid, lam_grid,
                   observation=None, resolution: QuadratureResolution | None = None,
                   csv_path=None, workers: int = 1) -> SweepResult:
    if len(tests) < 3:
        raise ContractError("a sweep needs at least three test functions")
    if len(s_grid) * len(lam_grid) < 12 or min(len(s_grid), len(lam_grid)) < 3:
        raise ContractError("the (s, lambda) grid must have at least 12 cells")
    s_grid = np.asarray(sorted(s_grid), float)
    lam_grid = np.asarray(sorted(lam_grid), float)
    resolution = resolution or QuadratureResolution()
    split = getattr(observation, "eps", None)

    def cell(ij):
        i, j = ij
        p = template.with_(s=s_grid[i], lam=lam_grid[j])
        quad = CarlemanQuadrature(p, resolution, split)
        return ij, [carleman_sides(p, coeffs, f, observation, resolution, quad) for f in tests]

    cells = [(i, j) for i in range(len(s_grid)) for j in range(len(lam_grid))]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(cell, cells))
    else:
        results = [cell(c) for c in cells]
    table = np.zeros((len(s_grid), len(lam_grid)))
    entries: list[CarlemanEntry] = []
    for (i, j), es in results:
        table[i, j] = max(e.ratio for e in es)
        entries.extend(es)
    s0, lam0, C = empirical_constants(table, s_grid, lam_grid)
    result = SweepResult(entries, s_grid, lam_grid, table, s0, lam0, C, coeffs.delta_gt_d)
    if csv_path is not None:
        result.write(csv_path)
    return result
