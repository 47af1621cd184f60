"""Oriented hypergraphs, their weights, and the weighted function spaces.

An oriented hypergraph on vertices ``0..N-1`` is a list of hyperarcs, each a
pair of disjoint, nonempty vertex sets ``(out, in)``. Four positive weight
arrays are attached: two per vertex (``w_I``, ``w_G``) and two per hyperarc
(``W_I``, ``W_G``). The ``*_I`` weights enter the inner products, the ``*_G``
weights enter the gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateHyperarcError,
    EmptySideError,
    HypergraphError,
    LengthMismatchError,
    NonpositiveWeightError,
    OverlappingSidesError,
    UnknownLabelError,
    VertexOutOfRangeError,
)

WEIGHT_RTOL = 1e-12


@dataclass(frozen=True)
class Hyperarc:
    """A hyperarc ``(out, in)`` with both sides stored as sorted tuples."""

    out_set: tuple[int, ...]
    in_set: tuple[int, ...]

    @classmethod
    def make(cls, out_set: Iterable[int], in_set: Iterable[int]) -> "Hyperarc":
        out_t = tuple(sorted({int(v) for v in out_set}))
        in_t = tuple(sorted({int(v) for v in in_set}))
        if not out_t or not in_t:
            raise EmptySideError(f"hyperarc {out_t} -> {in_t} has an empty side")
        overlap = set(out_t) & set(in_t)
        if overlap:
            raise OverlappingSidesError(
                f"hyperarc {out_t} -> {in_t}: vertices {sorted(overlap)} on both sides"
            )
        return cls(out_t, in_t)

    def reversed(self) -> "Hyperarc":
        return Hyperarc(self.in_set, self.out_set)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.out_set + self.in_set))


@dataclass(frozen=True, eq=False)
class OrientedHypergraph:
    """Immutable, validated oriented hypergraph.

    Build instances with :func:`build_hypergraph`; the constructor does not
    validate.
    """

    n_vertices: int
    hyperarcs: tuple[Hyperarc, ...]
    w_I: np.ndarray
    w_G: np.ndarray
    W_I: np.ndarray
    W_G: np.ndarray
    degree: np.ndarray
    labels: tuple[str, ...]
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def n_hyperarcs(self) -> int:
        return len(self.hyperarcs)

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(f"unknown vertex label {label!r}") from None

    def arc_position(self, arc: Hyperarc) -> int | None:
        """Position of ``arc`` in the hyperarc list, or None."""
        return self._index.get(("arc", arc.out_set, arc.in_set))

    def same_structure(self, other: "OrientedHypergraph") -> bool:
        """Field-by-field (bitwise for weights) equality."""
        return (
            self.n_vertices == other.n_vertices
            and self.hyperarcs == other.hyperarcs
            and self.labels == other.labels
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("w_I", "w_G", "W_I", "W_G", "degree")
            )
        )


def _weights(values, length: int, name: str) -> np.ndarray:
    if values is None:
        arr = np.ones(length)
        arr.setflags(write=False)
        return arr
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape[0] != length:
        raise LengthMismatchError(f"{name} has length {arr.shape[0]}, expected {length}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise NonpositiveWeightError(f"{name} must be finite and strictly positive")
    arr.setflags(write=False)
    return arr


def build_hypergraph(
    n_vertices: int,
    hyperarcs: Iterable,
    *,
    w_I=None,
    w_G=None,
    W_I=None,
    W_G=None,
    labels: Sequence[str] | None = None,
) -> OrientedHypergraph:
    """Validate and assemble an oriented hypergraph.

    Parameters
    ----------
    n_vertices : int
        Number of vertices ``N``; vertex ids are ``0..N-1``.
    hyperarcs : iterable
        Either :class:`Hyperarc` objects or ``(out, in)`` pairs of iterables.
    w_I, w_G : array_like, optional
        Per-vertex weights (default all ones).
    W_I, W_G : array_like, optional
        Per-hyperarc weights (default all ones).
    labels : sequence of str, optional
        External vertex names (default ``"0".."N-1"``).

    Raises
    ------
    EmptySideError, OverlappingSidesError, DuplicateHyperarcError,
    NonpositiveWeightError, VertexOutOfRangeError
    """
    n = int(n_vertices)
    if n < 0:
        raise VertexOutOfRangeError("n_vertices must be non-negative")
    arcs: list[Hyperarc] = []
    index: dict = {}
    for item in hyperarcs:
        if isinstance(item, Hyperarc):
            arc = Hyperarc.make(item.out_set, item.in_set)
        else:
            arc = Hyperarc.make(*item)
        for v in arc.out_set + arc.in_set:
            if not 0 <= v < n:
                raise VertexOutOfRangeError(f"vertex {v} not in [0, {n})")
        key = ("arc", arc.out_set, arc.in_set)
        if key in index:
            raise DuplicateHyperarcError(f"hyperarc {arc.out_set} -> {arc.in_set} repeated")
        index[key] = len(arcs)
        arcs.append(arc)

    m = len(arcs)
    degree = np.zeros(n, dtype=np.int64)
    for arc in arcs:
        degree[list(arc.out_set + arc.in_set)] += 1
    degree.setflags(write=False)

    if labels is None:
        labels = tuple(str(i) for i in range(n))
    else:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise LengthMismatchError(f"{len(labels)} labels for {n} vertices")
        if len(set(labels)) != n:
            raise HypergraphError("vertex labels must be unique")
    for i, lab in enumerate(labels):
        index[lab] = i

    return OrientedHypergraph(
        n_vertices=n,
        hyperarcs=tuple(arcs),
        w_I=_weights(w_I, n, "w_I"),
        w_G=_weights(w_G, n, "w_G"),
        W_I=_weights(W_I, m, "W_I"),
        W_G=_weights(W_G, m, "W_G"),
        degree=degree,
        labels=labels,
        _index=index,
    )


def weight_power(w: np.ndarray, x: float) -> np.ndarray:
    """``w ** x`` for positive ``w``, evaluated in log space unless x is 0 or 1."""
    w = np.asarray(w, dtype=float)
    if x == 0:
        return np.ones_like(w)
    if x == 1:
        return w.copy()
    return np.exp(x * np.log(w))


def _check_len(values, length: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise LengthMismatchError(f"{what} has shape {arr.shape}, expected ({length},)")
    return arr


def inner_product_vertex(h: OrientedHypergraph, f, g, alpha: float = 0.0) -> float:
    """``sum_i w_I(v_i)^alpha f(v_i) g(v_i)``."""
    f = _check_len(f, h.n_vertices, "f")
    g = _check_len(g, h.n_vertices, "g")
    return float(np.sum(weight_power(h.w_I, alpha) * f * g))


def inner_product_hyperarc(h: OrientedHypergraph, F, G, beta: float = 0.0) -> float:
    """``sum_q W_I(a_q)^beta F(a_q) G(a_q)``."""
    F = _check_len(F, h.n_hyperarcs, "F")
    G = _check_len(G, h.n_hyperarcs, "G")
    return float(np.sum(weight_power(h.W_I, beta) * F * G))


def _close(a: float, b: float, rtol: float = WEIGHT_RTOL) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


@dataclass
class SymmetryReport:
    """Result of :func:`check_symmetric_hyperarc_weights`.

    ``violations`` holds ``(q, r, weight_name)`` for each reversed pair
    ``a_r = reverse(a_q)`` (with ``q < r``) whose weights differ.
    """

    pairs: list[tuple[int, int]]
    violations: list[tuple[int, int, str]]

    @property
    def symmetric(self) -> bool:
        return not self.violations


def check_symmetric_hyperarc_weights(h: OrientedHypergraph) -> SymmetryReport:
    pairs, violations = [], []
    for q, arc in enumerate(h.hyperarcs):
        r = h.arc_position(arc.reversed())
        if r is None or r <= q:
            continue
        pairs.append((q, r))
        for name in ("W_G", "W_I"):
            W = getattr(h, name)
            if not _close(W[q], W[r]):
                violations.append((q, r, name))
    return SymmetryReport(pairs, violations)


def check_weight_condition(h: OrientedHypergraph, params) -> bool:
    """Whether constant vertex functions have vanishing gradient.

    For the general variant this is the pairwise condition
    ``w_I(k)^alpha w_G(k)^epsilon == w_I(j)^alpha w_G(j)^eta`` for every
    output vertex ``j`` and input vertex ``k`` of every hyperarc. The
    simplified variant drops the ``1/|a^in|``, ``1/|a^out|`` normalisation,
    so constants vanish only on hyperarcs with ``|out| == |in|``.
    """
    from .operators import Variant

    if params.variant is Variant.SIMPLIFIED:
        return all(len(a.out_set) == len(a.in_set) for a in h.hyperarcs)
    wi_a = weight_power(h.w_I, params.alpha)
    in_side = wi_a * weight_power(h.w_G, params.epsilon)
    out_side = wi_a * weight_power(h.w_G, params.eta)
    for arc in h.hyperarcs:
        ks = in_side[list(arc.in_set)]
        js = out_side[list(arc.out_set)]
        lo, hi = min(ks.min(), js.min()), max(ks.max(), js.max())
        if not _close(lo, hi):
            return False
    return True
