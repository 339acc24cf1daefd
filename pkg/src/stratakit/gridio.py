"""Flat binary layout for sampled maps on regular grids.

Layout (version 1, little-endian float64 throughout):

    header:  n, m, shape[0..n-1], min[0], max[0], ..., min[n-1], max[n-1]
    body:    row-major values, shape (*shape, nu)

``n`` is the grid's ambient dimension, ``m`` the slab dimension the grid was
generated for (a hint; commands may override it), and ``nu`` the value
dimension, inferred from the body size.  NaN values mark nodes outside the
map's domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SceneFormatError

GRID_LAYOUT_VERSION = 1


@dataclass(frozen=True)
class GridMap:
    bounds: np.ndarray      # (n, 2) of [min, max] per axis
    values: np.ndarray      # (*shape, nu); NaN rows = outside the domain
    m_hint: int

    @property
    def n(self) -> int:
        return self.bounds.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape[:-1]

    @property
    def nu(self) -> int:
        return self.values.shape[-1]

    def axis_levels(self, axis: int) -> np.ndarray:
        lo, hi = self.bounds[axis]
        return np.linspace(lo, hi, self.shape[axis])

    def steps(self) -> np.ndarray:
        return np.array([
            (hi - lo) / max(s - 1, 1)
            for (lo, hi), s in zip(self.bounds, self.shape)
        ])

    def node_positions(self) -> np.ndarray:
        axes = [self.axis_levels(i) for i in range(self.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def flat_values(self) -> np.ndarray:
        return self.values.reshape(-1, self.nu)


def write_grid(path, grid: GridMap) -> None:
    n = grid.n
    header = [float(n), float(grid.m_hint)]
    header += [float(s) for s in grid.shape]
    for lo, hi in grid.bounds:
        header += [float(lo), float(hi)]
    payload = np.concatenate([
        np.asarray(header, dtype="<f8"),
        np.ascontiguousarray(grid.values, dtype="<f8").ravel(),
    ])
    payload.tofile(path)


def read_grid(path) -> GridMap:
    raw = np.fromfile(path, dtype="<f8")
    if raw.size < 2:
        raise SceneFormatError("grid file too short for a header", "header")
    n = int(raw[0])
    m_hint = int(raw[1])
    if not 1 <= n <= 8 or raw[0] != n:
        raise SceneFormatError(f"invalid grid dimension {raw[0]}", "header.n")
    need = 2 + n + 2 * n
    if raw.size < need:
        raise SceneFormatError("grid header truncated", "header")
    shape = raw[2:2 + n]
    if np.any(shape != np.round(shape)) or np.any(shape < 2):
        raise SceneFormatError(f"invalid grid shape {shape.tolist()}", "header.shape")
    shape = tuple(int(s) for s in shape)
    bounds = raw[2 + n:need].reshape(n, 2)
    if np.any(bounds[:, 1] <= bounds[:, 0]):
        raise SceneFormatError("grid bounds must satisfy min < max", "header.bounds")
    body = raw[need:]
    cells = int(np.prod(shape))
    if body.size == 0 or body.size % cells != 0:
        raise SceneFormatError(
            f"body size {body.size} is not a multiple of the grid size {cells}", "body")
    nu = body.size // cells
    values = body.reshape(*shape, nu)
    return GridMap(bounds=bounds, values=values, m_hint=m_hint)
