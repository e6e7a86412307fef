"""Run every shipped scenario and write one report per scenario into results/."""

import argparse
import json
import sys
from pathlib import Path

from phaseoracle.cli import main

ROOT = Path(__file__).resolve().parent.parent


def run(out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    failed = []
    for path in sorted((ROOT / "scenarios").glob("*.json")):
        fmt = json.loads(path.read_text()).get("output", {}).get("format", "json")
        out = out_dir / f"{path.stem}.{fmt}"
        status = main(["run", "--scenario", str(path), "--out", str(out)])
        print(f"{'ok ' if status == 0 else 'ERR'} {path.name} -> {out.relative_to(ROOT) if out.is_relative_to(ROOT) else out}")
        if status:
            failed.append(path.name)
    return 1 if failed else 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=ROOT / "results")
    sys.exit(run(parser.parse_args().out_dir))
