#!/usr/bin/env python3
"""Generate the sampled-map grid files used by the coarea command.

Produces:
  coordinate.grid  -- f(x1, x2) = x1 on [0,1]^2; every level set is a segment
  annulus_xi.grid  -- nearest-circle-point map on the annulus 0.5 <= |x| <= 2
  identity.grid    -- f = identity on [0,1]^2; all fibers are single points

Usage: python scripts/make_grids.py [outdir] [--step 0.00390625]
"""

import argparse
from pathlib import Path

import numpy as np

from stratakit.gridio import GridMap, write_grid


def coordinate_grid(num: int = 129) -> GridMap:
    bounds = np.array([[0.0, 1.0], [0.0, 1.0]])
    x = np.linspace(0, 1, num)
    X, _ = np.meshgrid(x, x, indexing="ij")
    return GridMap(bounds, X[..., None].astype(float), m_hint=1)


def identity_grid(num: int = 65) -> GridMap:
    bounds = np.array([[0.0, 1.0], [0.0, 1.0]])
    x = np.linspace(0, 1, num)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return GridMap(bounds, np.stack([X, Y], axis=-1), m_hint=1)


def annulus_xi_grid(step: float = 1.0 / 256.0, r_in: float = 0.5, r_out: float = 2.0) -> GridMap:
    num = int(round(2 * r_out / step)) + 1
    bounds = np.array([[-r_out, r_out], [-r_out, r_out]])
    x = np.linspace(-r_out, r_out, num)
    X, Y = np.meshgrid(x, x, indexing="ij")
    radius = np.hypot(X, Y)
    inside = (radius >= r_in) & (radius <= r_out)
    safe = np.where(radius > 0, radius, 1.0)
    values = np.stack([X / safe, Y / safe], axis=-1)
    values[~inside] = np.nan
    return GridMap(bounds, values, m_hint=1)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", nargs="?", default="grids")
    parser.add_argument("--step", type=float, default=1.0 / 256.0,
                        help="grid step of the annulus map")
    args = parser.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_grid(out / "coordinate.grid", coordinate_grid())
    write_grid(out / "identity.grid", identity_grid())
    write_grid(out / "annulus_xi.grid", annulus_xi_grid(args.step))
    print(f"wrote coordinate.grid, identity.grid, annulus_xi.grid to {out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
