# moirank/ingest.py
"""
Dataset Ingestion
Parses accounts.csv, edges.csv and posts.jsonl into domain types, collecting
every problem into a ValidationReport instead of stopping at the first one.
"""

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import AbstractSet, Any, Dict, Iterator, List, Mapping, Optional, Sequence, Set, TextIO, Tuple, Union

from . import validator as v
from .engagement import AccountProfile, Post
from .errors import DatasetInvalid
from .graph_core import Edge, SocialGraph, build_graph, canonical_edge, is_valid_account_id
from .validator import ValidationReport

_LOG = logging.getLogger("moirank.ingest")

ACCOUNTS_HEADER = ["id", "handle", "category", "follower_count"]
EDGES_HEADER = ["src", "dst"]
ENGAGEMENT_FIELDS = ("likers", "mentioners", "retweeters")
TAXONOMY_PREFIX = "# taxonomy:"

ACCOUNTS_FILE = "accounts.csv"
EDGES_FILE = "edges.csv"
POSTS_FILE = "posts.jsonl"

PathLike = Union[str, Path]

_INTEGER = re.compile(r"[+-]?[0-9]+")


@dataclass(frozen=True)
class Dataset:
    """Validated accounts, friendship graph and posts."""
    profiles: Mapping[str, AccountProfile]
    graph: SocialGraph
    posts: Mapping[str, Tuple[Post, ...]]
    taxonomy: Tuple[str, ...]
    name: str = field(default="dataset", compare=False)

    def posts_of(self, account: str) -> Tuple[Post, ...]:
        return self.posts.get(account, ())

    def accounts_in(self, category: str) -> List[AccountProfile]:
        return [p for p in self.profiles.values() if p.category == category]


def _strip_bom(text: str) -> str:
    return text[1:] if text.startswith("\ufeff") else text


def _single_row(line: str) -> List[str]:
    return next(csv.reader([line.rstrip("\r")]), [])


def _runaway(lines: List[str], width: Optional[int]) -> bool:
    """A multi-line record opened by a stray quote rather than a real quoted newline."""
    if "\n".join(lines).count('"') % 2:
        return True
    return width is not None and all(len(_single_row(line)) == width for line in lines[1:])


def _csv_rows(
    text: str,
    source: str,
    report: ValidationReport,
    offset: int = 0,
    width: Optional[int] = None,
    bad_lines: AbstractSet[int] = frozenset(),
) -> Iterator[Tuple[int, List[str], bool]]:
    """
    Yield (first physical line, row, damaged) for every nonblank CSV record.

    damaged is True when the record is already reported: it covers a line in
    bad_lines, or a stray quote opened it. A stray-quote record is cut back to
    its first physical line, split on commas with quotes dropped so its id
    stays readable, and the lines after it keep their own records.
    """
    lines = text.split("\n")
    position = 0
    while position < len(lines):
        reader = csv.reader(io.StringIO("\n".join(lines[position:]), newline=""))
        consumed = 0
        restart = None
        while restart is None:
            try:
                row = next(reader)
            except StopIteration:
                return
            except csv.Error as exc:
                report.add_error(source, position + reader.line_num + offset, v.MALFORMED_RECORD, f"CSV syntax: {exc}")
                restart = position + max(reader.line_num, consumed + 1)
                break
            first, last = position + consumed, position + reader.line_num
            consumed = reader.line_num
            stray = last - first > 1 and _runaway(lines[first:last], width)
            if stray:
                row = [cell.strip('"') for cell in lines[first].rstrip("\r").split(",")]
                last = restart = first + 1
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            damaged = any(n + 1 + offset in bad_lines for n in range(first, last))
            if stray and not damaged:
                report.add_error(source, first + 1 + offset, v.MALFORMED_RECORD, "Unbalanced quote in record")
            damaged = damaged or stray
            yield first + 1 + offset, row, damaged
        position = restart


def _check_header(row: List[str], expected: List[str]) -> bool:
    return [cell.strip() for cell in row] == expected


def _owned(report: Optional[ValidationReport]) -> Tuple[ValidationReport, bool]:
    return (report, False) if report is not None else (ValidationReport(), True)


def _raise_if_owned(report: ValidationReport, owned: bool) -> None:
    if owned and not report.ok:
        raise DatasetInvalid(report)


def _parse_accounts(
    text: str,
    report: ValidationReport,
    source: str,
    taxonomy: Optional[Sequence[str]],
    bad_lines: AbstractSet[int] = frozenset(),
) -> Tuple[List[AccountProfile], List[str], Set[str]]:
    text = _strip_bom(text)
    offset = 0
    declared = list(taxonomy) if taxonomy is not None else None

    first_line, _, rest = text.partition("\n")
    if first_line.startswith(TAXONOMY_PREFIX):
        labels = next(csv.reader([first_line[len(TAXONOMY_PREFIX):].rstrip("\r")], skipinitialspace=True), [])
        labels = [label.strip() for label in labels if label.strip()]
        if declared is None:
            declared = labels
        text, offset = rest, 1

    labels_seen: List[str] = list(declared) if declared is not None else []
    profiles: List[AccountProfile] = []
    claimed: Set[str] = set()
    first_line_of: Dict[str, int] = {}
    header_seen = False
    records = 0

    for line, row, damaged in _csv_rows(text, source, report, offset, len(ACCOUNTS_HEADER), bad_lines):
        if not header_seen:
            if not damaged and not _check_header(row, ACCOUNTS_HEADER):
                report.add_error(source, line, v.MALFORMED_RECORD,
                                 f"Expected header {','.join(ACCOUNTS_HEADER)}, got {','.join(row)}")
                report.record_counts["accounts"] = 0
                return profiles, labels_seen, claimed
            header_seen = True
            continue

        records += 1
        if row and is_valid_account_id(row[0]):
            claimed.add(row[0])
        if damaged:
            continue

        if len(row) != len(ACCOUNTS_HEADER):
            report.add_error(source, line, v.MALFORMED_RECORD,
                             f"Expected {len(ACCOUNTS_HEADER)} fields, got {len(row)}")
            continue

        account_id, handle, category, raw_count = row
        raw_count = raw_count.strip()
        if not is_valid_account_id(account_id):
            report.add_error(source, line, v.MALFORMED_RECORD, f"Invalid account id {account_id!r}")
            continue
        if not category:
            report.add_error(source, line, v.MALFORMED_RECORD, "Empty category")
            continue
        try:
            count = int(raw_count) if _INTEGER.fullmatch(raw_count) else None
        except ValueError:
            count = None
        if count is None:
            report.add_error(source, line, v.MALFORMED_RECORD, f"follower_count {raw_count[:40]!r} is not an integer")
            continue
        if count < 0:
            report.add_error(source, line, v.NEGATIVE_FOLLOWER_COUNT, f"follower_count {count} is negative")
            continue
        if account_id in first_line_of:
            report.add_error(source, line, v.DUPLICATE_ACCOUNT_ID,
                             f"Account '{account_id}' already defined at line {first_line_of[account_id]}")
            continue
        if category not in labels_seen:
            if declared is not None:
                report.add_error(source, line, v.UNKNOWN_CATEGORY,
                                 f"Category '{category}' not in taxonomy {', '.join(declared)}")
                continue
            labels_seen.append(category)

        first_line_of[account_id] = line
        profiles.append(AccountProfile(id=account_id, handle=handle, category=category, follower_count=count))

    if not header_seen:
        report.add_error(source, 0, v.EMPTY_DATASET, "File is empty")
    elif records == 0:
        report.add_error(source, 0, v.EMPTY_DATASET, "No account records")

    report.record_counts["accounts"] = records
    return profiles, labels_seen, claimed


def parse_accounts(
    stream: TextIO,
    report: Optional[ValidationReport] = None,
    source: str = ACCOUNTS_FILE,
    taxonomy: Optional[Sequence[str]] = None,
) -> Tuple[List[AccountProfile], List[str]]:
    """
    Parse the accounts file.

    Args:
        stream: Character stream of accounts.csv
        report: Collector for issues; when omitted, errors raise DatasetInvalid
        source: File name used in issue locators
        taxonomy: Declared category labels (overrides a "# taxonomy:" line)

    Returns:
        (profiles in file order, taxonomy labels in order)
    """
    report, owned = _owned(report)
    profiles, labels, _ = _parse_accounts(stream.read(), report, source, taxonomy)
    _raise_if_owned(report, owned)
    return profiles, labels


def parse_edges(
    stream: TextIO,
    known: Set[str],
    report: Optional[ValidationReport] = None,
    source: str = EDGES_FILE,
    bad_lines: AbstractSet[int] = frozenset(),
) -> List[Edge]:
    """
    Parse the edges file into canonical undirected pairs.

    Duplicates and reversals collapse to the first occurrence with a
    DuplicateEdge warning.
    Lines in bad_lines were already reported as undecodable and are skipped.
    """
    report, owned = _owned(report)
    edges: List[Edge] = []
    first_line_of: Dict[Edge, int] = {}
    header_seen = False
    records = 0

    rows = _csv_rows(_strip_bom(stream.read()), source, report, width=len(EDGES_HEADER), bad_lines=bad_lines)
    for line, row, damaged in rows:
        if not header_seen:
            if not damaged and not _check_header(row, EDGES_HEADER):
                report.add_error(source, line, v.MALFORMED_RECORD,
                                 f"Expected header {','.join(EDGES_HEADER)}, got {','.join(row)}")
                break
            header_seen = True
            continue

        records += 1
        if damaged:
            continue
        if len(row) != len(EDGES_HEADER):
            report.add_error(source, line, v.MALFORMED_RECORD, f"Expected 2 fields, got {len(row)}")
            continue
        src, dst = row
        bad = [x for x in (src, dst) if not is_valid_account_id(x)]
        if bad:
            report.add_error(source, line, v.MALFORMED_RECORD, f"Invalid account id {bad[0]!r}")
            continue
        if src == dst:
            report.add_error(source, line, v.SELF_LOOP, f"Edge ({src}, {dst}) is a self-loop")
            continue
        missing = [x for x in (src, dst) if x not in known]
        if missing:
            report.add_error(source, line, v.UNKNOWN_ENDPOINT,
                             f"Edge ({src}, {dst}) references unknown account(s): {', '.join(missing)}")
            continue

        edge = canonical_edge(src, dst)
        if edge in first_line_of:
            report.add_warning(source, line, v.DUPLICATE_EDGE,
                               f"Edge ({src}, {dst}) duplicates line {first_line_of[edge]}")
            continue
        first_line_of[edge] = line
        edges.append(edge)

    if not header_seen and not any(e.file == source for e in report.errors):
        report.add_error(source, 0, v.MALFORMED_RECORD, "Missing header src,dst")

    report.record_counts["edges"] = records
    _raise_if_owned(report, owned)
    return edges


def _engagement_list(record: Dict[str, Any], name: str) -> Optional[List[str]]:
    """Return the array under name, [] if absent, None if malformed."""
    if name not in record:
        return []
    value = record[name]
    if not isinstance(value, list) or not all(is_valid_account_id(item) for item in value):
        return None
    return value


def parse_posts(
    stream: TextIO,
    known: Set[str],
    report: Optional[ValidationReport] = None,
    source: str = POSTS_FILE,
    bad_lines: AbstractSet[int] = frozenset(),
) -> List[Post]:
    """
    Parse posts.jsonl, one JSON object per line.

    Engagement arrays are deduplicated and stripped of the author, each with a
    warning. Engagers need not be tracked accounts.
    """
    report, owned = _owned(report)
    posts: List[Post] = []
    first_line_of: Dict[str, int] = {}
    records = 0

    text = _strip_bom(stream.read())
    for line, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        records += 1
        if line in bad_lines:
            continue

        try:
            record = json.loads(raw)
        except (ValueError, RecursionError) as exc:
            report.add_error(source, line, v.MALFORMED_RECORD, f"Invalid JSON: {exc}")
            continue
        if not isinstance(record, dict):
            report.add_error(source, line, v.MALFORMED_RECORD, "Expected a JSON object")
            continue

        post_id, author = record.get("post_id"), record.get("author")
        if not is_valid_account_id(post_id):
            report.add_error(source, line, v.MALFORMED_RECORD, f"Invalid post_id {post_id!r}")
            continue
        if not is_valid_account_id(author):
            report.add_error(source, line, v.MALFORMED_RECORD, f"Invalid author {author!r}")
            continue
        lists = {name: _engagement_list(record, name) for name in ENGAGEMENT_FIELDS}
        broken = [name for name, value in lists.items() if value is None]
        if broken:
            report.add_error(source, line, v.MALFORMED_RECORD,
                             f"'{broken[0]}' must be an array of account id strings")
            continue
        if author not in known:
            report.add_error(source, line, v.UNKNOWN_AUTHOR, f"Post '{post_id}' authored by unknown account '{author}'")
            continue
        if post_id in first_line_of:
            report.add_error(source, line, v.DUPLICATE_POST_ID,
                             f"Post id '{post_id}' already used at line {first_line_of[post_id]}")
            continue

        sets = {}
        for name, members in lists.items():
            unique = set(members)
            if len(unique) != len(members):
                report.add_warning(source, line, v.DUPLICATE_ENGAGER,
                                   f"Post '{post_id}': duplicate users in {name} collapsed")
            if author in unique:
                unique.discard(author)
                report.add_warning(source, line, v.SELF_ENGAGEMENT,
                                   f"Post '{post_id}': author removed from own {name}")
            sets[name] = frozenset(unique)

        first_line_of[post_id] = line
        posts.append(Post(post_id=post_id, author=author, **sets))

    report.record_counts["posts"] = records
    _raise_if_owned(report, owned)
    return posts


def _read_text(path: PathLike, source: str, report: ValidationReport) -> Tuple[Optional[str], Set[int]]:
    """
    Read a UTF-8 file.

    Undecodable lines are reported once and decoded with replacement
    characters; their numbers are returned so parsers skip them without
    losing the account id they carry.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        report.add_error(source, 0, v.IO_ERROR, f"Cannot read {path}: {exc.strerror or exc}")
        return None, set()

    if data.startswith(b"\xef\xbb\xbf"):
        data = data[3:]
    lines = []
    bad: Set[int] = set()
    for number, chunk in enumerate(data.split(b"\n"), start=1):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError as exc:
            report.add_error(source, number, v.MALFORMED_RECORD, f"Invalid UTF-8 at byte {exc.start}")
            bad.add(number)
            lines.append(chunk.decode("utf-8", errors="replace"))
    return "\n".join(lines), bad


def load_dataset(
    accounts_path: PathLike,
    edges_path: PathLike,
    posts_path: PathLike,
    taxonomy: Optional[Sequence[str]] = None,
    name: Optional[str] = None,
) -> Tuple[Optional[Dataset], ValidationReport]:
    """
    Load and cross-validate the three input files.

    All errors are collected in one pass over every file.

    Returns:
        (dataset, report); dataset is None iff report has errors
    """
    report = ValidationReport()
    sources = {key: Path(p).name for key, p in
               (("accounts", accounts_path), ("edges", edges_path), ("posts", posts_path))}

    accounts_text, accounts_bad = _read_text(accounts_path, sources["accounts"], report)
    edges_text, edges_bad = _read_text(edges_path, sources["edges"], report)
    posts_text, posts_bad = _read_text(posts_path, sources["posts"], report)

    profiles: List[AccountProfile] = []
    labels: List[str] = []
    known: Set[str] = set()
    if accounts_text is not None:
        profiles, labels, known = _parse_accounts(
            accounts_text, report, sources["accounts"], taxonomy, accounts_bad
        )

    edges: List[Edge] = []
    if edges_text is not None:
        edges = parse_edges(io.StringIO(edges_text, newline=""), known, report, sources["edges"], edges_bad)

    posts: List[Post] = []
    if posts_text is not None:
        posts = parse_posts(io.StringIO(posts_text, newline=""), known, report, sources["posts"], posts_bad)

    if not report.ok:
        _LOG.info("Dataset rejected: %d error(s), %d warning(s)", len(report.errors), len(report.warnings))
        return None, report

    grouped: Dict[str, List[Post]] = {p.id: [] for p in profiles}
    for post in posts:
        grouped[post.author].append(post)

    dataset = Dataset(
        profiles=MappingProxyType({p.id: p for p in profiles}),
        graph=build_graph([p.id for p in profiles], edges),
        posts=MappingProxyType({k: tuple(items) for k, items in grouped.items()}),
        taxonomy=tuple(labels),
        name=name or Path(accounts_path).resolve().parent.name,
    )
    _LOG.info(
        "Loaded dataset '%s': %d accounts, %d edges, %d posts, %d categories",
        dataset.name, len(profiles), dataset.graph.number_of_edges(), len(posts), len(labels),
    )
    return dataset, report


def dump_dataset(dataset: Dataset, directory: PathLike) -> Tuple[Path, Path, Path]:
    """
    Write a dataset back to accounts.csv, edges.csv and posts.jsonl.

    The taxonomy is written as a "# taxonomy:" line so label order survives.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(dataset.taxonomy)
    taxonomy_line = f"{TAXONOMY_PREFIX} {buffer.getvalue()}"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(ACCOUNTS_HEADER)
    for p in dataset.profiles.values():
        writer.writerow([p.id, p.handle, p.category, p.follower_count])
    accounts_file = out / ACCOUNTS_FILE
    accounts_file.write_text(taxonomy_line + buffer.getvalue(), encoding="utf-8")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(EDGES_HEADER)
    writer.writerows(dataset.graph.edges)
    edges_file = out / EDGES_FILE
    edges_file.write_text(buffer.getvalue(), encoding="utf-8")

    lines = [
        json.dumps(post.to_dict(), ensure_ascii=False)
        for account in dataset.profiles
        for post in dataset.posts_of(account)
    ]
    posts_file = out / POSTS_FILE
    posts_file.write_text("".join(line + "\n" for line in lines), encoding="utf-8")

    _LOG.debug("Dataset '%s' written to %s", dataset.name, out)
    return accounts_file, edges_file, posts_file
