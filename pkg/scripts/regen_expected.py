"""Regenerate the golden outputs in configs/expected/ from the shipped configs.

    python3 scripts/regen_expected.py [--check]
"""

import argparse
import sys
from pathlib import Path

from qstrip.cli import COMMANDS, run
from qstrip.config import load_config

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"
EXPECTED = CONFIGS / "expected"


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args()
    EXPECTED.mkdir(exist_ok=True)
    stale = []
    for path in sorted(CONFIGS.glob("*.json")):
        cfg = load_config(path)
        for cmd in COMMANDS:
            _, text = run(cmd, cfg)
            out = EXPECTED / f"{path.stem}.{cmd}.json"
            if args.check:
                if not out.exists() or out.read_text() != text:
                    stale.append(out.name)
            else:
                out.write_text(text)
    for name in stale:
        print(f"stale: {name}")
    return 1 if stale else 0


if __name__ == "__main__":
    sys.exit(main())
