"""Write time-resolved limit-cycle data for figures 2, 3 and 4 to ``results/``."""

import argparse
from pathlib import Path

from qotto.cli import main


def run(out_dir: Path, points: int) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for fig in (2, 3, 4):
        out = out_dir / f"figure{fig}.csv"
        code = main(["figure-data", str(fig), "--points", str(points), "--out", str(out)])
        if code:
            raise SystemExit(code)
        print(f"figure {fig} -> {out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--points", type=int, default=200)
    args = ap.parse_args()
    run(args.out_dir, args.points)
