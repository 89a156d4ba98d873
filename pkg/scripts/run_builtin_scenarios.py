#!/usr/bin/env python3
"""Run every scenario shipped under scenarios/ and print a one-line verdict.

The noninvariant scenario is expected to exit 1 (its whole point is to show
the invariance gate tripping); everything else must exit 0.
"""

from __future__ import annotations

import pathlib
import subprocess
import sys

EXPECTED_NONZERO = {"rotation_noninvariant_form.json": 1}


def main() -> int:
    root = pathlib.Path(__file__).resolve().parent.parent
    scenario_dir = root / "scenarios"
    bad = 0
    for path in sorted(scenario_dir.glob("*.json")):
        proc = subprocess.run(
            [sys.executable, "-m", "dirac_reduce", "run", str(path), "--format", "text"],
            capture_output=True,
            text=True,
        )
        expected = EXPECTED_NONZERO.get(path.name, 0)
        verdict = "ok" if proc.returncode == expected else "UNEXPECTED"
        if verdict != "ok":
            bad += 1
        summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else ""
        print(f"{verdict:>10}  exit={proc.returncode} (want {expected})  {path.name}: {summary}")
        if verdict != "ok":
            sys.stderr.write(proc.stdout + proc.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
