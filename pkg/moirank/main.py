# moirank/main.py
"""
moirank CLI Entry Point
Usage:
  moirank validate --data-dir data/telco65
  moirank ir --scenario telco65 --top 10
  moirank moi --scenario telco65 --mode raw --format csv
  moirank report --scenario telco65 --format json -o out/report.json
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import validator as v
from .engagement import EngagementMode
from .errors import ConfigError, DataError, NoPostsError, ZeroFollowersError
from .graph_core import influence_rank, top_k_by_rank
from .ingest import ACCOUNTS_FILE, EDGES_FILE, POSTS_FILE, Dataset, load_dataset
from .report_generator import (
    ReportGenerator,
    build_report,
    config_echo,
    export_dot,
    export_report,
    moi_rankings,
    network_summary,
    score_accounts,
)
from .utils import (
    OUTPUT_FORMATS,
    RunConfig,
    atomic_write_bytes,
    list_available_scenarios,
    load_config,
    load_scenario,
    merge_configs,
    resolve_log_level,
)

_LOG = logging.getLogger("moirank.main")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOT_CONVERGED = 3

_DEFAULTS = RunConfig()


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for invalid data."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    data = common.add_argument_group("dataset")
    data.add_argument("--accounts", dest="accounts_path", help="accounts.csv path")
    data.add_argument("--edges", dest="edges_path", help="edges.csv path")
    data.add_argument("--posts", dest="posts_path", help="posts.jsonl path")
    data.add_argument("--data-dir", help=f"Directory holding {ACCOUNTS_FILE}, {EDGES_FILE} and {POSTS_FILE}")
    data.add_argument("--config", help="JSON config file with RunConfig keys (flags override it)")
    data.add_argument("--scenario", help="Predefined scenario from configs/scenarios (e.g., telco65)")

    metrics = common.add_argument_group("metrics")
    metrics.add_argument("--mode", choices=[m.value for m in EngagementMode],
                         help=f"Engagement mode for ROA/MOI (default: {_DEFAULTS.mode})")
    metrics.add_argument("--damping", type=float, help=f"PageRank damping in [0, 1] (default: {_DEFAULTS.damping})")
    metrics.add_argument("--tol", type=float, help=f"L1 convergence tolerance (default: {_DEFAULTS.tol})")
    metrics.add_argument("--max-iter", type=int, help=f"Power iteration cap (default: {_DEFAULTS.max_iter})")
    metrics.add_argument("--top", dest="top_k", type=int, help=f"Rows in the IR ranking (default: {_DEFAULTS.top_k})")
    metrics.add_argument("--zero-followers", dest="zero_follower_policy", choices=["fail", "skip"],
                         help="Accounts with no followers or no posts: fail the run or exclude them "
                              f"(default: {_DEFAULTS.zero_follower_policy})")

    out = common.add_argument_group("output")
    out.add_argument("-o", "--output", help="Output file (csv: directory); default: stdout")
    out.add_argument("--format", choices=OUTPUT_FORMATS, help=f"Output format (default: {_DEFAULTS.format})")
    out.add_argument("--debug", action="store_true",
                     help="Enable debug logging (default: off; MOIRANK_LOG_LEVEL sets the level otherwise)")
    return common


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = _ArgumentParser(
        prog="moirank",
        description="moirank - Influence Rank and Magnitude of Influence for social account networks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0 success, 1 usage/IO error, 2 invalid data, 3 IR did not converge

Examples:
  moirank validate --data-dir data/telco65
  moirank ir --scenario telco65 --damping 1.0
  moirank moi --scenario telco65 --mode raw
  moirank report --scenario telco65 --format csv -o out/
  moirank --list-scenarios
        """,
    )
    parser.add_argument("--list-scenarios", action="store_true", help="List available scenarios")

    common = _common_options()
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.add_parser("validate", parents=[common], help="Load and validate the dataset only")
    commands.add_parser("ir", parents=[common], help="Network-wide Influence Rank table")
    commands.add_parser("moi", parents=[common], help="Per-category Magnitude of Influence tables")
    commands.add_parser("report", parents=[common], help="Full report with IR-vs-MOI divergence")

    args = parser.parse_args(argv)
    if not args.list_scenarios and not args.command:
        parser.error("a command is required (validate, ir, moi, report)")
    return args


def list_scenarios() -> None:
    """Print available scenarios."""
    scenarios = list_available_scenarios()
    if not scenarios:
        print("No scenarios found in configs/scenarios/")
        return

    print("\nAvailable Scenarios:")
    print("=" * 60)
    for scenario in scenarios:
        try:
            cfg = load_scenario(scenario)
            print(f"\n  {scenario}")
            print(f"    Name: {cfg.get('name', scenario)}")
            print(f"    Description: {cfg.get('description', 'No description')}")
        except Exception as e:
            print(f"  {scenario} (error loading: {e})")
    print()


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < scenario < config file < --data-dir < explicit flags."""
    cfg = _DEFAULTS.to_dict()
    if args.scenario:
        cfg = merge_configs(cfg, load_scenario(args.scenario))
    if args.config:
        cfg = merge_configs(cfg, load_config(args.config))
    if args.data_dir:
        base = Path(args.data_dir)
        cfg = merge_configs(cfg, {
            "accounts_path": str(base / ACCOUNTS_FILE),
            "edges_path": str(base / EDGES_FILE),
            "posts_path": str(base / POSTS_FILE),
        })
    flags = {
        key: getattr(args, key)
        for key in ("accounts_path", "edges_path", "posts_path", "mode", "damping", "tol",
                    "max_iter", "top_k", "zero_follower_policy", "output", "format")
    }
    return RunConfig.from_dict(merge_configs(cfg, flags)).validate()


def _load(config: RunConfig) -> Tuple[Optional[Dataset], v.ValidationReport, int]:
    dataset, report = load_dataset(config.accounts_path, config.edges_path, config.posts_path)
    if report.has_code(v.IO_ERROR):
        return None, report, EXIT_USAGE
    if not report.ok:
        return None, report, EXIT_DATA
    return dataset, report, EXIT_OK


def _emit(files: Dict[str, bytes], output: Optional[str]) -> None:
    """
    Write rendered output. Single documents go to the output file or stdout;
    multi-file CSV goes into the output directory or stdout with section markers.
    """
    if output is None:
        if len(files) == 1:
            sys.stdout.write(next(iter(files.values())).decode("utf-8"))
        else:
            chunks = [f"# {name}\n{data.decode('utf-8')}" for name, data in files.items()]
            sys.stdout.write("\n".join(chunks))
        sys.stdout.flush()
        return

    target = Path(output)
    if len(files) == 1 and not target.is_dir():
        atomic_write_bytes(target, next(iter(files.values())))
        _LOG.info("Output written to %s", target)
        return
    for name, data in files.items():
        atomic_write_bytes(target / name, data)
    _LOG.info("%d file(s) written to %s", len(files), target)


def _render(document: Dict, config: RunConfig, title: str) -> Dict[str, bytes]:
    generator = ReportGenerator(document, title=title)
    if config.format == "json":
        return {"report.json": generator.to_json()}
    if config.format == "csv":
        return generator.to_csv()
    return {"report.txt": generator.to_text().encode("utf-8")}


def cmd_validate(config: RunConfig) -> int:
    """Load and validate only; warnings alone still succeed."""
    _, report, status = _load(config)
    if config.format == "json":
        text = ReportGenerator(report.to_dict()).to_json().decode("utf-8")
    else:
        text = report.generate_report() + "\n"
    stream = sys.stdout if status == EXIT_OK else sys.stderr
    stream.write(text)
    if status == EXIT_USAGE:
        sys.stderr.write("usage: moirank validate --accounts PATH --edges PATH --posts PATH (or --data-dir DIR)\n")
    return status


def cmd_ir(config: RunConfig) -> int:
    """Influence Rank table; exit 3 (output still written) if IR did not converge."""
    dataset, report, status = _load(config)
    if dataset is None:
        sys.stderr.write(report.generate_report() + "\n")
        return status

    ranks = influence_rank(dataset.graph, float(config.damping), float(config.tol), config.max_iter)
    if config.format == "dot":
        _emit({"network.dot": export_dot(dataset.graph, ranks)}, config.output)
    else:
        document = {
            "generated_for": config_echo(dataset, config.engagement_mode, config.rank_config()),
            "network": network_summary(dataset.graph, ranks),
            "ir_top": [{"account": a, "ir": s} for a, s in top_k_by_rank(ranks, config.top_k)],
        }
        _emit(_render(document, config, "Influence Rank"), config.output)
    return EXIT_OK if ranks.converged else EXIT_NOT_CONVERGED


def cmd_moi(config: RunConfig) -> int:
    """Per-category MOI tables."""
    if config.format == "dot":
        raise ConfigError("format 'dot' is only available for ir and report")
    dataset, report, status = _load(config)
    if dataset is None:
        sys.stderr.write(report.generate_report() + "\n")
        return status

    try:
        results, exclusions = score_accounts(dataset, config.engagement_mode, config.zero_follower_policy)
    except (NoPostsError, ZeroFollowersError) as exc:
        _LOG.error("MOI failed for '%s': %s", exc.account, exc)
        sys.stderr.write(f"{exc.code}: {exc} (use --zero-followers skip to exclude it)\n")
        return EXIT_DATA

    rankings = moi_rankings(dataset, results)
    document = {
        "generated_for": config_echo(dataset, config.engagement_mode, config.rank_config()),
        "moi_by_category": {c: [{"account": a, "moi": s} for a, s in rows] for c, rows in rankings.items()},
        "exclusions": [{"account": a, "reason": r} for a, r in exclusions],
    }
    _emit(_render(document, config, f"Magnitude of Influence ({config.mode} mode)"), config.output)
    return EXIT_OK


def cmd_report(config: RunConfig) -> int:
    """Full report: IR ranking, MOI rankings, exclusions and divergence."""
    dataset, report, status = _load(config)
    if dataset is None:
        sys.stderr.write(report.generate_report() + "\n")
        return status

    rank_config = config.rank_config()
    ranks = influence_rank(dataset.graph, rank_config.damping, rank_config.tol, rank_config.max_iter)
    if config.format == "dot":
        _emit({"network.dot": export_dot(dataset.graph, ranks)}, config.output)
        return EXIT_OK if ranks.converged else EXIT_NOT_CONVERGED

    try:
        ranked = build_report(dataset, config.engagement_mode, rank_config, ranks=ranks)
    except (NoPostsError, ZeroFollowersError) as exc:
        _LOG.error("MOI failed for '%s': %s", exc.account, exc)
        sys.stderr.write(f"{exc.code}: {exc} (use --zero-followers skip to exclude it)\n")
        return EXIT_DATA

    if config.format in ("json", "csv"):
        files = export_report(ranked, config.format)
    else:
        files = _render(ranked.to_dict(), config, "Influence Report")
    _emit(files, config.output)
    return EXIT_OK if ranks.converged else EXIT_NOT_CONVERGED


COMMANDS = {
    "validate": cmd_validate,
    "ir": cmd_ir,
    "moi": cmd_moi,
    "report": cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    try:
        args = parse_arguments(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=resolve_log_level(getattr(args, "debug", False)),
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        datefmt="%H:%M:%S",
    )
    logging.getLogger("moirank").setLevel(resolve_log_level(getattr(args, "debug", False)))

    if args.list_scenarios:
        list_scenarios()
        return EXIT_OK

    try:
        config = build_config(args)
        return COMMANDS[args.command](config)
    except (ConfigError, FileNotFoundError) as e:
        _LOG.error("Configuration error: %s", e)
        sys.stderr.write(f"moirank: error: {e}\n")
        return EXIT_USAGE
    except DataError as e:
        _LOG.error("Data error: %s", e)
        sys.stderr.write(f"moirank: {e.code}: {e}\n")
        return EXIT_DATA
    except OSError as e:
        _LOG.error("I/O error: %s", e)
        sys.stderr.write(f"moirank: I/O error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
