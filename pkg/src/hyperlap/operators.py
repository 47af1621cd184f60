"""Vertex gradient, adjoint, divergence and the p-Laplacian family.

All first-order operators are linear maps between vertex functions (length
``N``) and hyperarc functions (length ``|A|``). :func:`assemble` precomputes
them once as two sparse matrices sharing one coefficient layout:

* ``grad``  (``|A| x N``): ``(grad f)(a_q) = sum_i G[q, i] f(v_i)``
* ``div``   (``N x |A|``): ``(div F)(v_i) = sum_q D[i, q] F(a_q)``

and the adjoint is ``-div``. The p-Laplacian is ``div(phi_p(grad f))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import OrientedHypergraph, _check_len, weight_power
from .errors import (
    HypergraphError,
    POutOfRangeError,
    ZeroDegreeVertexError,
    ZeroFunctionError,
)

DEFAULT_REGULARIZATION = 1e-8


class Variant(enum.Enum):
    GENERAL = "general"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True)
class OperatorParams:
    """Exponents of the weight functions plus the operator variant.

    ``alpha`` weights the vertex inner product, ``beta`` the hyperarc inner
    product, ``gamma`` the hyperarc gradient weight, ``epsilon``/``eta`` the
    input/output vertex gradient weights. The simplified variant (unnormalised
    incidence gradient, ``1/deg`` scaled divergence) requires all five to be 0.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    epsilon: float = 0.0
    eta: float = 0.0
    variant: Variant = Variant.GENERAL

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("alpha", "beta", "gamma", "epsilon", "eta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise HypergraphError(f"exponent {name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.variant is Variant.SIMPLIFIED and any(self.exponents()):
            raise HypergraphError("the simplified variant fixes all exponents to 0")

    def exponents(self) -> tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.epsilon, self.eta)

    @classmethod
    def simplified(cls) -> "OperatorParams":
        return cls(variant=Variant.SIMPLIFIED)


@dataclass(frozen=True, eq=False)
class IncidenceSystem:
    """Assembled operator coefficients for one hypergraph and parameter set.

    Attributes
    ----------
    grad : scipy.sparse.csr_matrix, shape (|A|, N)
    div : scipy.sparse.csr_matrix, shape (N, |A|)
    vertex_inner : ndarray
        ``w_I^alpha`` per vertex (the vertex inner-product weights).
    arc_inner : ndarray
        ``W_I^beta`` per hyperarc.
    arc_grad : ndarray
        ``W_G^gamma`` per hyperarc.
    """

    hypergraph: OrientedHypergraph
    params: OperatorParams
    grad: sp.csr_matrix
    div: sp.csr_matrix
    vertex_inner: np.ndarray
    arc_inner: np.ndarray
    arc_grad: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.hypergraph.n_vertices

    @property
    def n_hyperarcs(self) -> int:
        return self.hypergraph.n_hyperarcs

    @property
    def nnz(self) -> int:
        return int(self.grad.nnz)

    def grad_coefficients(self, q: int) -> dict[int, float]:
        row = self.grad.getrow(q)
        return {int(i): float(c) for i, c in zip(row.indices, row.data)}

    def div_coefficients(self, q: int) -> dict[int, float]:
        col = self.div.getcol(q).tocoo()
        return {int(i): float(c) for i, c in zip(col.row, col.data)}


def assemble(h: OrientedHypergraph, params: OperatorParams | None = None) -> IncidenceSystem:
    """Precompute gradient and divergence coefficients.

    Raises
    ------
    ZeroDegreeVertexError
        Simplified variant only, if a vertex has no incident hyperarc. Such a
        vertex never appears in a hyperarc, so in practice this only fires for
        isolated vertices, whose ``1/deg`` factor is undefined.
    """
    params = params or OperatorParams()
    n, m = h.n_vertices, h.n_hyperarcs
    simplified = params.variant is Variant.SIMPLIFIED
    if simplified and np.any(h.degree == 0):
        bad = np.flatnonzero(h.degree == 0)[:5].tolist()
        raise ZeroDegreeVertexError(f"vertices {bad} have degree 0")

    wi_a = weight_power(h.w_I, params.alpha)
    wg_eps = weight_power(h.w_G, params.epsilon)
    wg_eta = weight_power(h.w_G, params.eta)
    arc_inner = weight_power(h.W_I, params.beta)
    arc_grad = weight_power(h.W_G, params.gamma)

    rows, cols, gvals, dvals = [], [], [], []
    for q, arc in enumerate(h.hyperarcs):
        n_out, n_in = len(arc.out_set), len(arc.in_set)
        # vertices in ascending order so CSR rows come out sorted
        for v in arc.vertices:
            is_in = v in arc.in_set
            if simplified:
                sign = 1.0 if is_in else -1.0
                g = sign
                d = sign / h.degree[v]
            elif is_in:
                g = arc_grad[q] * wi_a[v] * wg_eps[v] / n_in
                d = -wg_eps[v] / n_in * arc_inner[q] * arc_grad[q]
            else:
                g = -arc_grad[q] * wi_a[v] * wg_eta[v] / n_out
                d = wg_eta[v] / n_out * arc_inner[q] * arc_grad[q]
            rows.append(q)
            cols.append(v)
            gvals.append(g)
            dvals.append(d)

    grad = sp.csr_matrix((gvals, (rows, cols)), shape=(m, n))
    div = sp.csr_matrix((dvals, (cols, rows)), shape=(n, m))
    grad.sort_indices()
    div.sort_indices()
    return IncidenceSystem(h, params, grad, div, wi_a, arc_inner, arc_grad)


def gradient(sys: IncidenceSystem, f) -> np.ndarray:
    f = _check_len(f, sys.n_vertices, "vertex state")
    return sys.grad @ f


def divergence(sys: IncidenceSystem, F) -> np.ndarray:
    F = _check_len(F, sys.n_hyperarcs, "hyperarc state")
    return sys.div @ F


def adjoint(sys: IncidenceSystem, F) -> np.ndarray:
    return -divergence(sys, F)


def _check_p(p: float, lower_open: bool = False) -> float:
    p = float(p)
    if not math.isfinite(p) or p < 1 or (lower_open and p == 1):
        bound = "(1, inf)" if lower_open else "[1, inf)"
        raise POutOfRangeError(f"p={p} outside {bound}")
    return p


def phi(x: np.ndarray, p: float, regularization: float = 0.0) -> np.ndarray:
    """``|x|^(p-2) x``, smoothed as ``(x^2 + r^2)^((p-2)/2) x`` when p < 2.

    With ``regularization == 0`` and ``p < 2`` the value at ``x == 0`` is
    defined as 0.
    """
    if p == 2:
        return np.array(x, dtype=float, copy=True)
    ax = np.abs(x)
    if p > 2:
        return ax ** (p - 2) * x
    if regularization > 0:
        return (x * x + regularization * regularization) ** ((p - 2) / 2) * x
    out = np.zeros_like(x, dtype=float)
    nz = ax > 0
    out[nz] = ax[nz] ** (p - 2) * x[nz]
    return out


def p_laplacian(sys: IncidenceSystem, f, p: float = 2.0, regularization: float = 0.0) -> np.ndarray:
    """``div(phi_p(grad f))`` through the assembled sparse system."""
    p = _check_p(p)
    if regularization < 0:
        raise HypergraphError("regularization must be non-negative")
    return sys.div @ phi(gradient(sys, f), p, regularization)


def p_laplacian_direct(sys: IncidenceSystem, f, p: float = 2.0) -> np.ndarray:
    """Evaluate the p-Laplacian from its expanded triple-sum form.

    Each hyperarc contributes, to each of its vertices ``v_i``, the leading
    divergence factor times ``W_I^beta W_G^(p*gamma)`` times
    ``|S_q|^(p-2) S_q`` with ``S_q`` the unweighted-by-``W_G`` gradient sum.
    Used only to cross-check :func:`p_laplacian`; it does not touch the
    assembled sparse matrices.
    """
    p = _check_p(p, lower_open=True)
    h, prm = sys.hypergraph, sys.params
    f = _check_len(f, h.n_vertices, "vertex state")
    simplified = prm.variant is Variant.SIMPLIFIED
    wi_a = weight_power(h.w_I, prm.alpha)
    wg_eps = weight_power(h.w_G, prm.epsilon)
    wg_eta = weight_power(h.w_G, prm.eta)
    out = np.zeros(h.n_vertices)
    for q, arc in enumerate(h.hyperarcs):
        n_out, n_in = len(arc.out_set), len(arc.in_set)
        s = 0.0
        for v in arc.vertices:
            if simplified:
                s += (1.0 if v in arc.in_set else -1.0) * f[v]
            elif v in arc.in_set:
                s += wi_a[v] * wg_eps[v] / n_in * f[v]
            else:
                s -= wi_a[v] * wg_eta[v] / n_out * f[v]
        if s == 0.0:
            continue
        flux = abs(s) ** (p - 2) * s
        if not simplified:
            flux *= weight_power(h.W_I[q : q + 1], prm.beta)[0]
            flux *= weight_power(h.W_G[q : q + 1], p * prm.gamma)[0]
        for v in arc.vertices:
            if simplified:
                lead = (1.0 if v in arc.in_set else -1.0) / h.degree[v]
            elif v in arc.in_set:
                lead = -wg_eps[v] / n_in
            else:
                lead = wg_eta[v] / n_out
            out[v] += lead * flux
    return out


def energy(sys: IncidenceSystem, f, p: float = 2.0) -> float:
    """``(1/p) sum_q W_I^beta |grad f(a_q)|^p``."""
    p = _check_p(p)
    g = gradient(sys, f)
    return float(np.sum(sys.arc_inner * np.abs(g) ** p) / p)


def energy_from_gradient(sys: IncidenceSystem, g: np.ndarray, p: float) -> float:
    return float(np.sum(sys.arc_inner * np.abs(g) ** p) / p)


def rayleigh_quotient(sys: IncidenceSystem, f, p: float = 2.0) -> float:
    """``p E_p(f) / sum_i w_I^alpha |f_i|^p``.

    For ``p == 2`` this is ``<f, -Lap f>_V / <f, f>_V``.
    """
    p = _check_p(p)
    f = _check_len(f, sys.n_vertices, "vertex state")
    denom = float(np.sum(sys.vertex_inner * np.abs(f) ** p))
    if denom == 0.0:
        raise ZeroFunctionError("Rayleigh quotient of the zero function")
    if p == 2:
        return float(-np.dot(sys.vertex_inner * f, p_laplacian(sys, f, 2.0)) / denom)
    return p * energy(sys, f, p) / denom
