"""Command-line front end.

    stratakit stratify --scene cube.json --m 0 --out results/
    stratakit verify   --scene cube.json --estimate one_sided --out results/
    stratakit coarea   --scene grid.bin  --m 1 --out results/

One command per process.  All outputs are canonical JSON / CSV / columnar
text written atomically; two runs with the same inputs and seeds produce
byte-identical canonical files.  ``STRATAKIT_THREADS`` caps worker threads
inside campaigns.  Exit status is 0 only when every report passes.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .covers import coarea_slab_cover, recheck_inverse_lipschitz
from .errors import (
    InsufficientSampleError,
    PreconditionError,
    SceneFormatError,
    TheoremViolationError,
    UnsupportedInputError,
)
from .estimates import ESTIMATE_IDS, run_estimate
from .gridio import read_grid
from .reportio import (
    CampaignResult,
    atomic_write_text,
    canonical_json,
    format_columns,
    format_csv,
)
from .scene import load_scene
from .stratify import stratify_sampled

EXIT_OK = 0
EXIT_REPORT_FAILED = 1
EXIT_BAD_INPUT = 2


def _parse_q_grid(text: str) -> list[float]:
    try:
        grid = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise SceneFormatError(f"invalid --q-grid value: {exc}", "--q-grid")
    if not grid or any(q <= 0 for q in grid):
        raise SceneFormatError("--q-grid needs positive comma-separated radii", "--q-grid")
    return grid


def cmd_stratify(args) -> int:
    scene = load_scene(args.scene)
    A = scene.build_set()
    seed = args.seed if args.seed is not None else scene.seed
    q_grid = _parse_q_grid(args.q_grid) if args.q_grid else scene.q_grid(A.nominal_diameter())
    if args.m is not None:
        m_values = [args.m]
    else:
        m_values = [int(m) for m in scene.params.get("m_values", [0])]
    probes = scene.probe_points(A)

    t0 = time.perf_counter()
    reports = [stratify_sampled(A, m, probes, q_grid, seed=seed) for m in m_values]
    wall = time.perf_counter() - t0

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = CampaignResult(scene.scene_id, "stratify", reports, seed, wall)
    result.write(out / f"{scene.scene_id}_stratify.json")
    for m, rep in zip(m_values, reports):
        rows = [list(c.point) + [c.est_dim, int(c.in_stratum), c.q_used]
                for c in rep.classified]
        coord_names = [f"x{i}" for i in range(A.ambient)]
        header = coord_names + ["est_dim", "in_stratum", "q_used"]
        atomic_write_text(out / f"{scene.scene_id}_stratify_m{m}.csv",
                          format_csv(rows, header))
        atomic_write_text(out / f"{scene.scene_id}_stratify_m{m}.dat",
                          format_columns(rows, header))
        kept = sum(c.in_stratum for c in rep.classified)
        print(f"stratify {scene.scene_id} m={m}: {kept}/{len(rep.classified)} "
              f"probes in stratum")
    return EXIT_OK


def cmd_verify(args) -> int:
    scene = load_scene(args.scene)
    if args.estimate not in ESTIMATE_IDS:
        raise SceneFormatError(
            f"unknown estimate {args.estimate!r}; expected one of {', '.join(ESTIMATE_IDS)}",
            "--estimate")
    A = scene.build_set()
    seed = args.seed if args.seed is not None else scene.seed
    params = scene.estimate_params(args.estimate)
    report = run_estimate(A, args.estimate, params, seed, scene_id=scene.scene_id)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / f"{scene.scene_id}_verify_{args.estimate}.json",
                      canonical_json(report.to_json_dict()))
    status = "pass" if report.passed else "FAIL"
    print(f"verify {scene.scene_id} {args.estimate}: {status} "
          f"worst_residual={report.worst_residual:.3e} over {report.samples} samples")
    if not report.passed:
        print(f"  witness: {report.worst_witness}")
        return EXIT_REPORT_FAILED
    return EXIT_OK


def cmd_coarea(args) -> int:
    grid = read_grid(args.scene)
    m = args.m if args.m is not None else grid.m_hint
    t0 = time.perf_counter()
    report = coarea_slab_cover(
        grid, m, args.z_threshold, args.lip_bound,
        value_bin_width=args.value_bin_width,
        extra_rotations=args.rotations,
        seed=args.seed if args.seed is not None else 0,
    )
    wall = time.perf_counter() - t0
    bad = [i for i, p in enumerate(report.pieces)
           if not recheck_inverse_lipschitz(p, args.lip_bound)]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = Path(args.scene).stem
    result = CampaignResult(name, "coarea", [report],
                            args.seed if args.seed is not None else 0, wall)
    result.write(out / f"{name}_coarea.json")
    rows = []
    for i, p in enumerate(report.pieces):
        rows.append([i, p.kind, p.sample_positions.shape[0],
                     p.inverse_lipschitz, p.new_bins])
    atomic_write_text(out / f"{name}_coarea_pieces.csv",
                      format_csv(rows, ["piece", "kind", "samples",
                                        "inverse_lipschitz", "new_bins"]))
    print(f"coarea {name} m={m}: covered_fraction={report.covered_fraction:.4f} "
          f"pieces={len(report.pieces)}")
    if bad:
        print(f"  inverse-Lipschitz recheck FAILED for pieces {bad}")
        return EXIT_REPORT_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratakit",
        description="Touching-ball strata, projection estimates, and slab covers "
                    "of closed subsets of R^n.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scene_help):
        p.add_argument("--scene", required=True, help=scene_help)
        p.add_argument("--seed", type=int, default=None,
                       help="override the scene's seed")
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("stratify", help="classify probe points into strata")
    common(p, "scene JSON file")
    p.add_argument("--m", type=int, default=None, help="stratum index")
    p.add_argument("--q-grid", default=None,
                   help="comma-separated probe radii, e.g. 0.1,0.25")
    p.set_defaults(fn=cmd_stratify)

    p = sub.add_parser("verify", help="run one estimate campaign")
    common(p, "scene JSON file")
    p.add_argument("--estimate", required=True, choices=ESTIMATE_IDS)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("coarea", help="slab-cover a sampled map grid")
    common(p, "binary grid file (see the grid layout in the README)")
    p.add_argument("--m", type=int, default=None, help="slab dimension")
    p.add_argument("--z-threshold", type=int, default=20,
                   help="cells per value bin for a heavy fiber")
    p.add_argument("--lip-bound", type=float, default=16.0,
                   help="inverse-Lipschitz bound for retained pieces")
    p.add_argument("--value-bin-width", type=float, default=None)
    p.add_argument("--rotations", type=int, default=16,
                   help="number of extra randomly rotated planes")
    p.set_defaults(fn=cmd_coarea)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SceneFormatError as exc:
        print(f"stratakit {args.command}: scene error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (UnsupportedInputError, PreconditionError) as exc:
        print(f"stratakit {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except TheoremViolationError as exc:
        print(f"stratakit {args.command}: THEOREM VIOLATION: {exc}", file=sys.stderr)
        return EXIT_REPORT_FAILED
    except InsufficientSampleError as exc:
        print(f"stratakit {args.command}: sampling failure: {exc}", file=sys.stderr)
        return EXIT_REPORT_FAILED
    except OSError as exc:
        print(f"stratakit {args.command}: i/o error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
