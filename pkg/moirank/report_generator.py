# moirank/report_generator.py
"""
Influence Report Generation
Assembles IR and MOI results into rankings, the IR-vs-MOI divergence table,
and renders them as JSON, CSV, aligned text or DOT.
"""

import csv
import io
import json
import logging
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import graphviz

from .engagement import EngagementMode, ModeLike, MoiResult, moi
from .errors import ConfigError, NoPostsError, ZeroFollowersError
from .graph_core import (
    DEFAULT_DAMPING,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    RankVector,
    SocialGraph,
    influence_rank,
    rank_order,
    top_k_by_rank,
)
from .ingest import Dataset

_LOG = logging.getLogger("moirank.report_generator")

# Bare DOT identifiers: alphanumeric names and numerals; everything else is quoted.
_DOT_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|-?(\.[0-9]+|[0-9]+(\.[0-9]*)?)")
_DOT_KEYWORDS = {"node", "edge", "graph", "digraph", "subgraph", "strict"}

DEFAULT_TOP_K = 5
ZERO_FOLLOWER_POLICIES = ("fail", "skip")

SECTION_HEADERS = {
    "ir_top": ["rank", "account", "ir"],
    "moi_by_category": ["category", "rank", "account", "moi"],
    "exclusions": ["account", "reason"],
    "divergence": ["account", "ir_rank", "moi_rank", "rank_gap"],
}


@dataclass(frozen=True)
class RankConfig:
    """Parameters for IR and for handling accounts whose MOI is undefined."""
    damping: float = DEFAULT_DAMPING
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    top_k: int = DEFAULT_TOP_K
    zero_follower_policy: str = "fail"

    def __post_init__(self):
        if self.zero_follower_policy not in ZERO_FOLLOWER_POLICIES:
            raise ConfigError(
                f"zero_follower_policy must be one of {ZERO_FOLLOWER_POLICIES}, got {self.zero_follower_policy!r}"
            )
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True)
class DivergenceRow:
    account: str
    ir_rank: int
    moi_rank: int
    rank_gap: int


@dataclass(frozen=True)
class RankedReport:
    """
    Network-wide IR ranking, per-category MOI rankings and their divergence.

    rank_gap = moi_rank - ir_rank, both ordinals over the ranked accounts.
    """
    generated_for: Mapping[str, Any]
    network: Mapping[str, Any]
    ir_top: Tuple[Tuple[str, float], ...]
    moi_by_category: Mapping[str, Tuple[Tuple[str, float], ...]]
    exclusions: Tuple[Tuple[str, str], ...]
    divergence: Tuple[DivergenceRow, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "generated_for": dict(self.generated_for),
            "network": dict(self.network),
            "ir_top": _pairs_to_rows(self.ir_top, "ir"),
            "moi_by_category": {
                category: _pairs_to_rows(rows, "moi") for category, rows in self.moi_by_category.items()
            },
            "exclusions": [{"account": a, "reason": r} for a, r in self.exclusions],
            "divergence": [
                {"account": d.account, "ir_rank": d.ir_rank, "moi_rank": d.moi_rank, "rank_gap": d.rank_gap}
                for d in self.divergence
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RankedReport":
        return cls(
            generated_for=dict(data["generated_for"]),
            network=dict(data["network"]),
            ir_top=tuple((row["account"], row["ir"]) for row in data["ir_top"]),
            moi_by_category={
                category: tuple((row["account"], row["moi"]) for row in rows)
                for category, rows in data["moi_by_category"].items()
            },
            exclusions=tuple((row["account"], row["reason"]) for row in data["exclusions"]),
            divergence=tuple(
                DivergenceRow(row["account"], row["ir_rank"], row["moi_rank"], row["rank_gap"])
                for row in data["divergence"]
            ),
        )


def _pairs_to_rows(pairs: Sequence[Tuple[str, float]], key: str) -> List[Dict[str, Any]]:
    return [{"account": account, key: value} for account, value in pairs]


def config_echo(dataset: Dataset, mode: ModeLike, config: RankConfig) -> Dict[str, Any]:
    return {
        "dataset": dataset.name,
        "mode": EngagementMode(mode).value,
        "damping": config.damping,
        "tol": config.tol,
        "max_iter": config.max_iter,
        "top_k": config.top_k,
        "zero_follower_policy": config.zero_follower_policy,
    }


def network_summary(graph: SocialGraph, ranks: RankVector) -> Dict[str, Any]:
    return {
        "nodes": graph.number_of_nodes(),
        "edges": graph.number_of_edges(),
        "connected": graph.is_connected(),
        "bipartite": graph.is_bipartite(),
        "isolated": len(graph.isolated_nodes()),
        "components": graph.number_of_components(),
        "density": graph.density(),
        "clustering": graph.average_clustering(),
        "diameter": graph.diameter(),
        "damping": ranks.damping,
        "iterations": ranks.iterations,
        "converged": ranks.converged,
        "residual": ranks.residual,
    }


def score_accounts(
    dataset: Dataset,
    mode: ModeLike,
    policy: str = "fail",
) -> Tuple[Dict[str, MoiResult], List[Tuple[str, str]]]:
    """
    MOI for every account.

    Under the "skip" policy accounts with no posts or no followers are
    returned as (account, reason) exclusions; under "fail" the error propagates.
    """
    results: Dict[str, MoiResult] = {}
    exclusions: List[Tuple[str, str]] = []
    for profile in dataset.profiles.values():
        try:
            results[profile.id] = moi(profile, dataset.posts_of(profile.id), mode)
        except (NoPostsError, ZeroFollowersError) as exc:
            if policy != "skip":
                raise
            _LOG.warning("Excluding '%s' from rankings: %s", profile.id, exc)
            exclusions.append((profile.id, exc.code))
    exclusions.sort()
    return results, exclusions


def moi_rankings(dataset: Dataset, results: Mapping[str, MoiResult]) -> Dict[str, Tuple[Tuple[str, float], ...]]:
    """Per-category MOI lists in taxonomy order."""
    rankings = {}
    for category in dataset.taxonomy:
        scores = {p.id: results[p.id].moi for p in dataset.accounts_in(category) if p.id in results}
        rankings[category] = tuple(rank_order(scores))
    return rankings


def divergence_table(ir_scores: Mapping[str, float], moi_scores: Mapping[str, float]) -> List[DivergenceRow]:
    """
    Ordinal IR rank vs network-wide MOI rank for every ranked account,
    largest |rank_gap| first.
    """
    ranked = set(moi_scores)
    ir_rank = {a: i for i, (a, _) in enumerate(rank_order({a: ir_scores[a] for a in ranked}), start=1)}
    moi_rank = {a: i for i, (a, _) in enumerate(rank_order(dict(moi_scores)), start=1)}
    rows = [DivergenceRow(a, ir_rank[a], moi_rank[a], moi_rank[a] - ir_rank[a]) for a in ranked]
    return sorted(rows, key=lambda row: (-abs(row.rank_gap), row.account))


def build_report(
    dataset: Dataset,
    mode: ModeLike = EngagementMode.STRICT,
    rank_config: Optional[RankConfig] = None,
    ranks: Optional[RankVector] = None,
) -> RankedReport:
    """
    Compute IR once over the graph and MOI per account, then assemble rankings.

    Args:
        dataset: Validated dataset
        mode: Engagement mode for ROA/MOI
        rank_config: IR parameters, top-k and zero-follower policy
        ranks: Precomputed IR for this dataset's graph (computed if omitted)

    Raises:
        NoPostsError, ZeroFollowersError: Under the "fail" policy
    """
    config = rank_config or RankConfig()
    if ranks is None:
        ranks = influence_rank(dataset.graph, config.damping, config.tol, config.max_iter)

    results, exclusions = score_accounts(dataset, mode, config.zero_follower_policy)
    moi_scores = {account: result.moi for account, result in results.items()}

    report = RankedReport(
        generated_for=config_echo(dataset, mode, config),
        network=network_summary(dataset.graph, ranks),
        ir_top=tuple(top_k_by_rank(ranks, config.top_k)),
        moi_by_category=moi_rankings(dataset, results),
        exclusions=tuple(exclusions),
        divergence=tuple(divergence_table(ranks.scores, moi_scores)),
    )
    _LOG.info(
        "Report built: %d ranked, %d excluded, opinion leader '%s'",
        len(results), len(exclusions), report.ir_top[0][0],
    )
    return report


class ReportGenerator:
    """
    Render a report document (RankedReport.to_dict() or any subset of its
    sections) as canonical JSON, per-section CSV, or aligned text.
    """

    def __init__(self, document: Dict[str, Any], title: str = "Influence Report"):
        self.document = document
        self.title = title

    def to_json(self) -> bytes:
        text = json.dumps(self.document, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
        return (text + "\n").encode("utf-8")

    def to_csv(self) -> Dict[str, bytes]:
        """One CSV file per section present, keyed by file name."""
        files: Dict[str, bytes] = {}

        meta = self._meta_rows()
        if meta:
            files["meta.csv"] = _csv_bytes(["key", "value"], meta)
        for section, header in SECTION_HEADERS.items():
            if section in self.document:
                files[f"{section}.csv"] = _csv_bytes(header, self._section_rows(section))
        return files

    def to_text(self) -> str:
        lines = []
        lines.append("=" * 80)
        lines.append(self.title)
        lines.append("=" * 80)

        for key, value in self._meta_rows():
            lines.append(f"{key}: {value}")
        lines.append("")

        if "ir_top" in self.document:
            lines.append("INFLUENCE RANK (network-wide)")
            lines.append("-" * 80)
            lines.extend(_aligned(SECTION_HEADERS["ir_top"], self._section_rows("ir_top")))
            lines.append("")

        if "moi_by_category" in self.document:
            for category, rows in self.document["moi_by_category"].items():
                lines.append(f"MAGNITUDE OF INFLUENCE - {category}")
                lines.append("-" * 80)
                body = [[i, r["account"], _fmt(r["moi"])] for i, r in enumerate(rows, start=1)]
                lines.extend(_aligned(["rank", "account", "moi"], body))
                lines.append("")

        if self.document.get("exclusions"):
            lines.append("EXCLUSIONS")
            lines.append("-" * 80)
            lines.extend(_aligned(SECTION_HEADERS["exclusions"], self._section_rows("exclusions")))
            lines.append("")

        if "divergence" in self.document:
            lines.append("IR vs MOI DIVERGENCE")
            lines.append("-" * 80)
            lines.extend(_aligned(SECTION_HEADERS["divergence"], self._section_rows("divergence")))
            lines.append("")

        lines.append("=" * 80)
        return "\n".join(lines) + "\n"

    def _meta_rows(self) -> List[List[str]]:
        rows = []
        for section in ("generated_for", "network"):
            for key, value in sorted(self.document.get(section, {}).items()):
                rows.append([f"{section}.{key}", value if isinstance(value, str) else json.dumps(value)])
        return rows

    def _section_rows(self, section: str) -> List[List[Any]]:
        data = self.document[section]
        if section == "ir_top":
            return [[i, r["account"], _fmt(r["ir"])] for i, r in enumerate(data, start=1)]
        if section == "moi_by_category":
            return [
                [category, i, r["account"], _fmt(r["moi"])]
                for category, rows in data.items()
                for i, r in enumerate(rows, start=1)
            ]
        if section == "exclusions":
            return [[r["account"], r["reason"]] for r in data]
        return [[r["account"], r["ir_rank"], r["moi_rank"], r["rank_gap"]] for r in data]


def _fmt(value: float) -> str:
    return repr(float(value))


def _csv_bytes(header: List[str], rows: List[List[Any]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().encode("utf-8")


def _aligned(header: List[str], rows: List[List[Any]]) -> List[str]:
    cells = [[str(c) for c in header]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    return ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]


def export_report(report: RankedReport, format: str = "json") -> Dict[str, bytes]:
    """
    Serialize a report deterministically.

    Returns:
        {"report.json": bytes} for json, one entry per section for csv
    """
    generator = ReportGenerator(report.to_dict())
    if format == "json":
        return {"report.json": generator.to_json()}
    if format == "csv":
        return generator.to_csv()
    raise ValueError(f"Unsupported report format {format!r}")


def export_dot(graph: SocialGraph, ranks: RankVector) -> bytes:
    """
    Undirected DOT for external renderers; each node carries its IR as "ir".
    Nodes in ascending id order, edges in ascending (min, max) order.
    """
    missing = [n for n in graph.nodes if n not in ranks.scores]
    if missing:
        raise ValueError(f"Ranks missing for {len(missing)} node(s), e.g. '{missing[0]}'")

    dot = graphviz.Graph(name="social_network")
    # node()/edge() read "a:b" as a port and "<b>" as an HTML label; ids are written literally.
    for node in graph.nodes:
        dot.body.append(f"\t{_dot_id(node)} [ir={_dot_id(_fmt(ranks.scores[node]))}]\n")
    for a, b in graph.edges:
        dot.body.append(f"\t{_dot_id(a)} -- {_dot_id(b)}\n")
    return dot.source.encode("utf-8")


def _dot_id(value: str) -> str:
    """One DOT ID per distinct string: bare when safe, otherwise a quoted string with \\ and " escaped."""
    if _DOT_ID.fullmatch(value) and value.lower() not in _DOT_KEYWORDS:
        return value
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'
