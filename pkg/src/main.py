"""
Main CLI entry point for the quantum-walk graph kernel toolkit.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .alignment import correspondence_set, dump_correspondence
from .cache import get_cache_manager
from .classify import format_report_keyvalue, format_report_table, repeated_cv, stratified_cv
from .dataset_loader import load_dataset, load_dataset_with_report
from .errors import ConfigurationError, ContractViolation, QgkError
from .features import compute_features, extract_features
from .graph_core import dataset_statistics
from .kernels import export_gram, gram, most_negative_eigenvalue
from .models import Dataset, GramMatrix, RunConfig
from .selftest import run_selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with EXIT_USAGE."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", type=str, help="Directory holding <NAME>_A.txt and friends")
    common.add_argument("--name", type=str, help="Dataset name (file prefix, e.g. MUTAG)")
    common.add_argument("--kernel", choices=["aerk", "dbmk", "rgk"], default="aerk",
                        help="Kernel to compute (default: aerk)")
    common.add_argument("--levels", "-H", type=int, default=10,
                        help="Depth levels H (default: 10)")
    common.add_argument("--seed", type=int, default=42, help="Tiebreak and fold seed (default: 42)")
    common.add_argument("--normalize", action="store_true", help="Normalize the Gram matrix")
    common.add_argument("--folds", type=int, default=10, help="Cross-validation folds (default: 10)")
    common.add_argument("--neighbors", type=int, default=1, help="k of kernel k-NN (default: 1)")
    common.add_argument("--repeats", type=int, default=1,
                        help="Repeat cross-validation with seeds seed..seed+N-1 (default: 1)")
    common.add_argument("--out", type=str, help="Output file")
    common.add_argument("--format", choices=["csv", "svm"], default="csv",
                        help="Gram export format (default: csv)")
    common.add_argument("--cache-dir", type=str,
                        help="Feature cache directory (default: $QGK_CACHE_DIR or ~/.qgk_cache)")
    common.add_argument("--no-cache", action="store_true",
                        help="Disable caching (recompute features even if cached)")
    common.add_argument("--threads", type=int, help="Worker budget (default: CPU count)")
    common.add_argument("--dump-pair", type=int, nargs=2, metavar=("P", "Q"),
                        help="Also write the correspondence set of graphs P and Q to <out>.corr.txt")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    parser = _ArgumentParser(
        prog="qgk",
        description="Quantum-walk entropy graph kernels: features, Gram matrices and classification",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("features", parents=[common], help="Compute and cache per-graph features")
    subparsers.add_parser("kernel", parents=[common], help="Compute and export a Gram matrix")
    subparsers.add_parser("classify", parents=[common], help="Cross-validate kernel k-NN")
    subparsers.add_parser("selftest", parents=[common], help="Run the embedded oracle checks")
    subparsers.add_parser("stats", parents=[common], help="Print dataset statistics")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        dataset_path=Path(args.dataset) if args.dataset else None,
        name=args.name,
        kernel=args.kernel.upper(),
        levels=args.levels,
        seed=args.seed,
        normalize=args.normalize,
        folds=args.folds,
        neighbors=args.neighbors,
        repeats=args.repeats,
        output=Path(args.out) if args.out else None,
        export_format=args.format,
        cache_dir=Path(args.cache_dir) if args.cache_dir else None,
        use_cache=not args.no_cache,
        threads=args.threads,
        dump_pair=tuple(args.dump_pair) if args.dump_pair else None,
    )
    if cfg.threads < 1:
        raise ConfigurationError(f"--threads must be >= 1, got {cfg.threads}")
    cfg.kernel_config()
    if cfg.command not in ("selftest",) and (cfg.dataset_path is None or not cfg.name):
        raise ConfigurationError(f"'{cfg.command}' needs --dataset and --name")
    return cfg


def _load(cfg: RunConfig) -> Dataset:
    return load_dataset(cfg.dataset_path, cfg.name)


def _cache(cfg: RunConfig):
    return get_cache_manager(cfg.cache_dir) if cfg.use_cache else None


def cmd_features(cfg: RunConfig) -> int:
    dataset = _load(cfg)
    _, summary = extract_features(dataset, cfg.levels, _cache(cfg), cfg.threads)
    print(f"Dataset {dataset.name}: {summary.graph_count} graphs, H={cfg.levels}")
    print(f"  computed:           {summary.computed}")
    print(f"  cache hits:         {summary.cache_hits}")
    if summary.recomputed_corrupt:
        print(f"  recomputed corrupt: {summary.recomputed_corrupt}")
    if summary.cache_hits == summary.graph_count:
        print("  all features served from cache (no recomputation)")
    print(f"  elapsed:            {summary.elapsed_seconds:.2f}s")
    return EXIT_OK


def _compute_gram(cfg: RunConfig, dataset: Dataset) -> GramMatrix:
    kernel_cfg = cfg.kernel_config()
    return gram(dataset, kernel_cfg, threads=cfg.threads, cache=_cache(cfg))


def cmd_kernel(cfg: RunConfig) -> int:
    dataset = _load(cfg)
    g = _compute_gram(cfg, dataset)
    output = cfg.output or Path(f"{dataset.name}_{g.config.kind.lower()}.{cfg.export_format}")
    export_gram(g, cfg.export_format, output)
    print(f"Saved {g.size}x{g.size} {g.config.kind} Gram matrix to: {output}")
    print(f"Most negative eigenvalue: {most_negative_eigenvalue(g)!r}")

    if cfg.dump_pair:
        p, q = cfg.dump_pair
        if not (0 <= p < len(dataset) and 0 <= q < len(dataset)):
            raise ConfigurationError(f"--dump-pair ids must be in 0..{len(dataset) - 1}")
        fp = compute_features(dataset.graphs[p], cfg.levels)
        fq = compute_features(dataset.graphs[q], cfg.levels)
        if q < p:
            fp, fq = fq, fp
        corr_path = dump_correspondence(
            correspondence_set(fp, fq, cfg.levels, cfg.seed), Path(f"{output}.corr.txt")
        )
        print(f"Saved correspondence set of graphs {p} and {q} to: {corr_path}")
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    dataset = _load(cfg)
    if cfg.folds > len(dataset):
        raise ConfigurationError(f"folds ({cfg.folds}) exceeds dataset size ({len(dataset)})")
    g = _compute_gram(cfg, dataset)
    if cfg.repeats > 1:
        report = repeated_cv(g, folds=cfg.folds, neighbors=cfg.neighbors, seed=cfg.seed,
                             repeats=cfg.repeats, threads=cfg.threads)
    else:
        report = stratified_cv(g, folds=cfg.folds, neighbors=cfg.neighbors, seed=cfg.seed,
                               threads=cfg.threads)
    keyvalue = format_report_keyvalue(report)
    print(format_report_table(report))
    print()
    print(keyvalue, end="")
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as f:
            f.write(keyvalue)
        print(f"Saved report to: {cfg.output}")
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    results = run_selftest()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name}: {result.detail}")
    failed = sum(1 for r in results if not r.passed)
    print(f"\n{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


def cmd_stats(cfg: RunConfig) -> int:
    dataset, report = load_dataset_with_report(cfg.dataset_path, cfg.name)
    rows = dataset_statistics(dataset).as_rows()
    rows.append(("self-loops dropped", str(report.self_loops_dropped)))
    rows.append(("duplicate rows merged", str(report.duplicate_rows_merged)))
    width = max(len(key) for key, _ in rows)
    for key, value in rows:
        print(f"{key.ljust(width)}  {value}")
    return EXIT_OK


COMMANDS = {
    "features": cmd_features,
    "kernel": cmd_kernel,
    "classify": cmd_classify,
    "selftest": cmd_selftest,
    "stats": cmd_stats,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = run_config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except QgkError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except ContractViolation as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
