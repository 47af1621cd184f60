"""Edge-list ingestion, network-to-hypergraph constructions, and file formats.

Edge lists are SNAP-style text: one ``A B`` pair per line meaning "A follows
B" (``reverse_pairs=True`` flips this), ``#`` or ``%`` starting a comment.
"""

from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .core import Hyperarc, OrientedHypergraph, build_hypergraph
from .errors import (
    EmptyInputError,
    HypergraphError,
    LengthMismatchError,
    MalformedLineError,
    ParseError,
    SchemaVersionMismatchError,
    UnknownLeaderError,
)

SCHEMA_NAME = "hyperlap.oriented-hypergraph"
SCHEMA_VERSION = 1


@dataclass
class ArcList:
    """Cleaned follower relation.

    ``arcs[k] = (follower, followed)`` as indices into ``labels``. Labels are
    numbered in order of first appearance.
    """

    labels: list[str]
    arcs: np.ndarray
    self_loops_removed: int = 0
    duplicates_removed: int = 0
    index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.arcs = np.asarray(self.arcs, dtype=np.int64).reshape(-1, 2)
        if not self.index:
            self.index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def n_arcs(self) -> int:
        return int(self.arcs.shape[0])

    def pairs(self) -> list[tuple[str, str]]:
        return [(self.labels[a], self.labels[b]) for a, b in self.arcs.tolist()]

    def follower_counts(self) -> np.ndarray:
        return np.bincount(self.arcs[:, 1], minlength=self.n_labels)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "ArcList":
        """Build from ``(follower, followed)`` label pairs, applying the
        same cleaning rules as :func:`parse_edge_list`."""
        index: dict[str, int] = {}
        labels: list[str] = []
        seen: set[tuple[int, int]] = set()
        arcs: list[tuple[int, int]] = []
        loops = dups = 0
        for a, b in pairs:
            a, b = str(a), str(b)
            if a == b:
                loops += 1
                continue
            ia = index.get(a)
            if ia is None:
                ia = index[a] = len(labels)
                labels.append(a)
            ib = index.get(b)
            if ib is None:
                ib = index[b] = len(labels)
                labels.append(b)
            key = (ia, ib)
            if key in seen:
                dups += 1
                continue
            seen.add(key)
            arcs.append(key)
        return cls(labels, np.array(arcs, dtype=np.int64), loops, dups, index)


def _iter_pairs(stream: TextIO, max_lines: int | None, reverse_pairs: bool):
    for lineno, line in enumerate(stream, start=1):
        if max_lines is not None and lineno > max_lines:
            break
        parts = line.split()
        if not parts or parts[0][0] in "#%":
            continue
        if len(parts) != 2:
            raise MalformedLineError(lineno, line.rstrip("\n"))
        yield (parts[1], parts[0]) if reverse_pairs else (parts[0], parts[1])


def parse_edge_list(
    source: TextIO | str, max_lines: int | None = None, reverse_pairs: bool = False
) -> ArcList:
    """Parse a whitespace-separated edge list.

    Self-loops and repeated pairs are dropped and counted. ``max_lines``
    counts physical lines, comments included.

    Raises
    ------
    MalformedLineError
        A non-comment line without exactly two tokens (1-based line number).
    EmptyInputError
        No arcs survive cleaning.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    arcs = ArcList.from_pairs(_iter_pairs(stream, max_lines, reverse_pairs))
    if arcs.n_arcs == 0:
        raise EmptyInputError("edge list contains no usable arcs")
    return arcs


def build_follower_star(arcs: ArcList) -> OrientedHypergraph:
    """One hyperarc ``({u}, followers(u))`` per followed user ``u``.

    Hyperarcs are ordered by the index of ``u``; weights are all 1.
    """
    if arcs.n_arcs == 0:
        raise EmptyInputError("no arcs")
    followers: dict[int, list[int]] = {}
    for a, b in arcs.arcs.tolist():
        followers.setdefault(b, []).append(a)
    hyperarcs = [Hyperarc.make((u,), followers[u]) for u in sorted(followers)]
    return build_hypergraph(arcs.n_labels, hyperarcs, labels=arcs.labels)


def build_pairwise(arcs: ArcList) -> OrientedHypergraph:
    """One singleton hyperarc ``({u}, {v})`` per arc ``u -> v`` (u follows v)."""
    if arcs.n_arcs == 0:
        raise EmptyInputError("no arcs")
    hyperarcs = [Hyperarc((a,), (b,)) for a, b in arcs.arcs.tolist()]
    return build_hypergraph(arcs.n_labels, hyperarcs, labels=arcs.labels)


def _undirected_adjacency(arcs: ArcList) -> list[list[int]]:
    adj: list[set[int]] = [set() for _ in range(arcs.n_labels)]
    for a, b in arcs.arcs.tolist():
        adj[a].add(b)
        adj[b].add(a)
    return [sorted(s) for s in adj]


def _bfs(adj: list[list[int]], start: int, limit: int | None = None) -> list[int]:
    order, seen = [start], {start}
    queue = deque([start])
    while queue and (limit is None or len(order) < limit):
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                order.append(v)
                queue.append(v)
                if limit is not None and len(order) >= limit:
                    break
    return order


def is_weakly_connected(arcs: ArcList) -> bool:
    if arcs.n_labels == 0:
        return True
    return len(_bfs(_undirected_adjacency(arcs), 0)) == arcs.n_labels


def extract_subnetwork(
    arcs: ArcList, leader: str | None = "auto", max_vertices: int | None = None
) -> ArcList:
    """Breadth-first, weakly connected sub-network around ``leader``.

    ``leader="auto"`` (or None) picks the label with the most followers,
    lowest index on ties. The result keeps the arcs induced by the visited
    labels, with labels renumbered in visiting order.
    """
    if leader is None or leader == "auto":
        start = int(np.argmax(arcs.follower_counts()))
    else:
        if leader not in arcs.index:
            raise UnknownLeaderError(f"leader {leader!r} not in the network")
        start = arcs.index[leader]
    if max_vertices is not None and max_vertices < 1:
        raise HypergraphError("max_vertices must be >= 1")
    keep = _bfs(_undirected_adjacency(arcs), start, max_vertices)
    pos = {old: new for new, old in enumerate(keep)}
    sub = [
        (pos[a], pos[b])
        for a, b in arcs.arcs.tolist()
        if a in pos and b in pos
    ]
    labels = [arcs.labels[i] for i in keep]
    return ArcList(labels, np.array(sub, dtype=np.int64).reshape(-1, 2))


# ----------------------------------------------------------------------------
# persistence


def hypergraph_to_dict(h: OrientedHypergraph) -> dict:
    lab = h.labels
    return {
        "schema": SCHEMA_NAME,
        "version": SCHEMA_VERSION,
        "labels": list(lab),
        "hyperarcs": [
            {"out": [lab[v] for v in a.out_set], "in": [lab[v] for v in a.in_set]}
            for a in h.hyperarcs
        ],
        # json writes floats with repr(), which round-trips bit-exactly
        "w_I": h.w_I.tolist(),
        "w_G": h.w_G.tolist(),
        "W_I": h.W_I.tolist(),
        "W_G": h.W_G.tolist(),
    }


def hypergraph_from_dict(doc: dict) -> OrientedHypergraph:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "$")
    if doc.get("schema") != SCHEMA_NAME:
        raise ParseError(f"unknown schema {doc.get('schema')!r}", "$.schema")
    if doc.get("version") != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"schema version {doc.get('version')!r}, this build reads {SCHEMA_VERSION}"
        )
    for key in ("labels", "hyperarcs", "w_I", "w_G", "W_I", "W_G"):
        if not isinstance(doc.get(key), list):
            raise ParseError("missing or not a list", f"$.{key}")
    labels = [str(s) for s in doc["labels"]]
    index = {s: i for i, s in enumerate(labels)}
    hyperarcs = []
    for q, arc in enumerate(doc["hyperarcs"]):
        try:
            out = [index[s] for s in arc["out"]]
            inn = [index[s] for s in arc["in"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad hyperarc entry ({exc})", f"$.hyperarcs[{q}]") from None
        hyperarcs.append((out, inn))
    return build_hypergraph(
        len(labels),
        hyperarcs,
        w_I=doc["w_I"],
        w_G=doc["w_G"],
        W_I=doc["W_I"],
        W_G=doc["W_G"],
        labels=labels,
    )


def save_hypergraph(h: OrientedHypergraph, path) -> None:
    Path(path).write_text(json.dumps(hypergraph_to_dict(h), indent=1) + "\n")


def load_hypergraph(path) -> OrientedHypergraph:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    return hypergraph_from_dict(doc)


def _fmt(x: float) -> str:
    return repr(float(x))


def save_vertex_state(h: OrientedHypergraph, f, path, extra: dict | None = None) -> None:
    """CSV with header ``label,value[,extra...]``, one row per vertex."""
    f = np.asarray(f, dtype=float)
    if f.shape != (h.n_vertices,):
        raise LengthMismatchError("state length differs from vertex count")
    extra = extra or {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "value", *extra])
        for i, lab in enumerate(h.labels):
            w.writerow([lab, _fmt(f[i]), *(col[i] for col in extra.values())])


def load_vertex_state(h: OrientedHypergraph, path) -> np.ndarray:
    """Read a ``label,value`` CSV; every vertex must appear exactly once."""
    f = np.full(h.n_vertices, np.nan)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"label", "value"} <= set(reader.fieldnames):
            raise ParseError("header must contain label,value", f"{path}:1")
        for row_no, row in enumerate(reader, start=2):
            try:
                i = h.index_of(row["label"])
                f[i] = float(row["value"])
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(str(exc), f"{path}:{row_no}") from None
    if np.isnan(f).any():
        missing = [h.labels[i] for i in np.flatnonzero(np.isnan(f))[:5]]
        raise ParseError(f"missing values for labels {missing}", str(path))
    return f


def save_hyperarc_state(h: OrientedHypergraph, F, path) -> None:
    """CSV with header ``index,out,in,value``; out/in are space-joined labels."""
    F = np.asarray(F, dtype=float)
    if F.shape != (h.n_hyperarcs,):
        raise LengthMismatchError("state length differs from hyperarc count")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "out", "in", "value"])
        for q, a in enumerate(h.hyperarcs):
            w.writerow([
                q,
                " ".join(h.labels[v] for v in a.out_set),
                " ".join(h.labels[v] for v in a.in_set),
                _fmt(F[q]),
            ])


def load_hyperarc_state(h: OrientedHypergraph, path) -> np.ndarray:
    F = np.full(h.n_hyperarcs, np.nan)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"index", "value"} <= set(reader.fieldnames):
            raise ParseError("header must contain index,value", f"{path}:1")
        for row_no, row in enumerate(reader, start=2):
            try:
                F[int(row["index"])] = float(row["value"])
            except (ValueError, TypeError, IndexError) as exc:
                raise ParseError(str(exc), f"{path}:{row_no}") from None
    if np.isnan(F).any():
        raise ParseError("missing hyperarc values", str(path))
    return F


def save_trace(trace, path) -> None:
    from .dynamics import TRACE_COLUMNS

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for rec in trace:
            w.writerow([rec[0], *(_fmt(x) for x in rec[1:])])


def load_trace(path):
    from .dynamics import TRACE_COLUMNS, TraceRecord

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != TRACE_COLUMNS:
            raise ParseError(f"expected header {','.join(TRACE_COLUMNS)}", f"{path}:1")
        out = []
        for row_no, row in enumerate(reader, start=2):
            try:
                out.append(TraceRecord(int(row[0]), *(float(x) for x in row[1:])))
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), f"{path}:{row_no}") from None
    return out
