#!/usr/bin/env python3
"""Run the bundled scenes through every command and collect the reports.

Usage: python scripts/run_all.py [--out results] [--scenes scenes]
"""

import argparse
from pathlib import Path

from stratakit.cli import main as cli_main

STRATIFY_SCENES = ("cube", "square", "segment", "circle", "two_balls")
VERIFY_PLAN = {
    "cube": ("angle", "projection_lipschitz", "cone_distance", "one_sided",
             "cone_control", "corollary_cone_control", "quadratic_contact"),
    "square": ("angle", "projection_lipschitz", "one_sided", "cone_control"),
    "segment": ("projection_lipschitz", "one_sided"),
    "circle": ("angle", "projection_lipschitz", "one_sided", "cone_control",
               "corollary_cone_control", "quadratic_contact"),
    "two_balls": ("projection_lipschitz", "one_sided"),
    "line": ("quadratic_contact",),
    "half_plane_box": ("quadratic_contact",),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--scenes", default="scenes")
    args = parser.parse_args()
    scenes = Path(args.scenes)
    failures = 0
    for name in STRATIFY_SCENES:
        rc = cli_main(["stratify", "--scene", str(scenes / f"{name}.json"),
                       "--out", args.out])
        failures += rc != 0
    for name, estimates in VERIFY_PLAN.items():
        for est in estimates:
            rc = cli_main(["verify", "--scene", str(scenes / f"{name}.json"),
                           "--estimate", est, "--out", args.out])
            failures += rc != 0
    print(f"done; {failures} failing commands")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
