"""5-fold cross-validated comparison on a UCI-style CSV (linear kernel, z-scored folds)."""
import argparse
import time
from pathlib import Path

from edsvm.dataio import read_csv, write_json
from edsvm.evaluation import ExperimentConfig, run_experiment

DEFAULT = Path(__file__).resolve().parents[1] / "data" / "australian.csv"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--data", default=str(DEFAULT))
    p.add_argument("--map01", action="store_true", help="map 0/1 labels to -1/+1")
    p.add_argument("--kernel", default="linear", choices=["linear", "rbf", "poly"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="optional JSON report path")
    args = p.parse_args()

    data, _ = read_csv(args.data, map01=args.map01)
    cfg = ExperimentConfig(mode="cv", kernel=args.kernel, standardize=True, targets=("uci",),
                           seed=args.seed)
    t0 = time.perf_counter()
    report = run_experiment(data, cfg)
    print(report.format_table(percent=True))
    print(f"elapsed {time.perf_counter() - t0:.0f}s")
    if args.out:
        write_json(args.out, report.to_dict())


if __name__ == "__main__":
    main()
