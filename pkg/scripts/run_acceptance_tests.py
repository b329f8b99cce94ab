"""Run the desk-scale acceptance tests (the ``slow`` marker)."""

from __future__ import annotations

import os
import subprocess
import sys
from pathlib import Path


def main() -> None:
    repo_root = Path(__file__).resolve().parents[1]
    env = os.environ.copy()
    env.setdefault("GASBALL_LOG_LEVEL", "INFO")

    # the marker expression on the command line replaces the default "not slow"
    command = ["pytest", "-m", "slow", "-vv", *sys.argv[1:]]

    completed = subprocess.run(command, cwd=str(repo_root), env=env)
    if completed.returncode != 0:
        raise SystemExit(completed.returncode)


if __name__ == "__main__":
    main()
