"""Explicit scale-space flows driven by the hypergraph p-Laplacian.

Three flows share one forward-Euler step ``f <- f + tau * Lap_p f``:

* :func:`neumann_flow` - the unconstrained initial value problem, which
  conserves the weighted mean and tends to the constant mean state;
* :func:`renormalized_flow` - the same flow observed through
  ``g = (f - mean) / ||f - mean||``, whose limit is a second eigenfunction;
* :func:`dirichlet_solve` - the flow on interior vertices with boundary
  vertices clamped, whose stationary states solve the p-Laplace equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import OrientedHypergraph, _check_len, weight_power
from .errors import (
    DegenerateInitialError,
    EmptyInteriorError,
    HypergraphError,
    LengthMismatchError,
    NotConvergedError,
    UnsupportedVariantError,
)
from .operators import (
    DEFAULT_REGULARIZATION,
    IncidenceSystem,
    Variant,
    energy_from_gradient,
    gradient,
    p_laplacian,
    phi,
)

POWER_ITERATIONS = 50
TAU_MIN, TAU_MAX = 1e-12, 1e3
CFL_SAFETY = 0.9
MAX_HALVINGS = 60
RENORMALIZED_STEP_FACTOR = 0.5
# slack for "energy did not increase" checks, absorbs summation rounding
ENERGY_RTOL = 1e-12


@dataclass
class FlowConfig:
    """Settings shared by all flows.

    ``tau=None`` selects the automatic CFL step size with energy backtracking.
    ``regularization=None`` resolves to 1e-8 for ``p < 2`` and 0 otherwise.
    """

    p: float = 2.0
    tau: float | None = None
    tolerance: float = 1e-6
    max_iterations: int = 1_000_000
    regularization: float | None = None
    seed: int = 0
    renormalize: bool = False
    record_every: int = 100

    def __post_init__(self):
        if not self.p >= 1:
            raise HypergraphError(f"p must be >= 1, got {self.p}")
        if not self.tolerance > 0:
            raise HypergraphError("tolerance must be positive")
        if self.tau is not None and not self.tau > 0:
            raise HypergraphError("tau must be positive")
        if self.regularization is not None and self.regularization < 0:
            raise HypergraphError("regularization must be non-negative")
        if self.record_every < 1:
            raise HypergraphError("record_every must be >= 1")

    @property
    def reg(self) -> float:
        if self.regularization is not None:
            return float(self.regularization)
        return DEFAULT_REGULARIZATION if self.p < 2 else 0.0


@dataclass
class BoundaryCondition:
    """Dirichlet data: fixed ``values`` on distinct ``vertices``."""

    vertices: np.ndarray
    values: np.ndarray

    def __init__(self, pairs=None, *, vertices=None, values=None):
        if pairs is not None:
            items = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
            vertices = [int(v) for v, _ in items]
            values = [float(x) for _, x in items]
        self.vertices = np.asarray(vertices, dtype=np.int64).reshape(-1)
        self.values = np.asarray(values, dtype=float).reshape(-1)
        if self.vertices.shape != self.values.shape:
            raise LengthMismatchError("boundary vertices and values differ in length")
        if len(set(self.vertices.tolist())) != self.vertices.size:
            raise HypergraphError("boundary vertices must be distinct")

    def interior_mask(self, n: int) -> np.ndarray:
        if self.vertices.size == 0:
            raise HypergraphError("empty boundary condition")
        if self.vertices.min() < 0 or self.vertices.max() >= n:
            raise HypergraphError("boundary vertex out of range")
        mask = np.ones(n, dtype=bool)
        mask[self.vertices] = False
        if not mask.any():
            raise EmptyInteriorError("every vertex is a boundary vertex")
        return mask


class TraceRecord(NamedTuple):
    iteration: int
    relative_change: float
    energy: float
    weighted_mean: float
    rayleigh_quotient: float


TRACE_COLUMNS = TraceRecord._fields


@dataclass
class FlowResult:
    final_state: np.ndarray
    iterations: int
    converged: bool
    tau: float
    trace: list[TraceRecord] = field(default_factory=list)

    def check(self) -> "FlowResult":
        """Return self, or raise :class:`NotConvergedError` if the cap was hit."""
        if not self.converged:
            raise NotConvergedError(
                f"no convergence after {self.iterations} iterations", result=self
            )
        return self


def weighted_mean(h: OrientedHypergraph, f, alpha: float = 0.0) -> float:
    """``sum_i w_I^alpha f_i / sum_i w_I^alpha``."""
    f = _check_len(f, h.n_vertices, "vertex state")
    w = weight_power(h.w_I, alpha)
    return float(np.dot(w, f) / np.sum(w))


def threshold(f, level: float = 0.0) -> np.ndarray:
    """Labels +1 where ``f >= level`` and -1 where ``f < level``."""
    f = np.asarray(f, dtype=float)
    return np.where(f >= level, 1, -1).astype(np.int64)


def _require_general(sys: IncidenceSystem) -> None:
    # the simplified operator has the opposite sign convention (positive
    # semidefinite), so an explicit forward step would amplify, not diffuse
    if sys.params.variant is not Variant.GENERAL:
        raise UnsupportedVariantError("flows require the general operator variant")


def _wnorm(sys: IncidenceSystem, f: np.ndarray) -> float:
    return math.sqrt(float(np.dot(sys.vertex_inner * f, f)))


def _wmean(sys: IncidenceSystem, f: np.ndarray) -> float:
    return float(np.dot(sys.vertex_inner, f) / np.sum(sys.vertex_inner))


def _rq(sys: IncidenceSystem, f: np.ndarray, g: np.ndarray, p: float) -> float:
    denom = float(np.sum(sys.vertex_inner * np.abs(f) ** p))
    if denom == 0.0:
        return float("nan")
    return float(np.sum(sys.arc_inner * np.abs(g) ** p) / denom)


def _largest_eigenvalue(sys: IncidenceSystem, seed: int) -> float:
    """Power-iteration estimate of the top eigenvalue of ``-Lap_2``.

    ``-Lap_2`` is self-adjoint in the weighted vertex inner product, so the
    iteration is normalised in that norm. Returns the larger of the Rayleigh
    quotient and the norm ratio ``||Ax|| / ||x||``; both are lower bounds.
    """
    n = sys.n_vertices
    if sys.n_hyperarcs == 0 or n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= _wnorm(sys, x)
    lam = 0.0
    for _ in range(POWER_ITERATIONS):
        y = -(sys.div @ (sys.grad @ x))
        ny = _wnorm(sys, y)
        if ny == 0.0:
            return lam
        lam = max(lam, float(np.dot(sys.vertex_inner * x, y)), ny)
        x = y / ny
    return lam


def _base_step(sys: IncidenceSystem, p: float, f0: np.ndarray, reg: float, seed: int) -> float:
    lam = _largest_eigenvalue(sys, seed)
    tau = CFL_SAFETY * 2.0 / lam if lam > 0 else TAU_MAX
    if p != 2:
        scale = float(np.max(np.abs(gradient(sys, f0)), initial=0.0)) + reg
        with np.errstate(divide="ignore", over="ignore"):
            tau = tau * scale ** (2.0 - p) if scale > 0 else TAU_MAX
    return float(min(max(tau, TAU_MIN), TAU_MAX))


def _energy_ok(new: float, old: float) -> bool:
    return new <= old + ENERGY_RTOL * abs(old)


def estimate_step_size(
    sys: IncidenceSystem,
    p: float,
    f0,
    regularization: float | None = None,
    seed: int = 0,
) -> float:
    """CFL-style step size for the explicit scheme.

    For ``p == 2``: ``0.9 * 2 / lambda_max`` with ``lambda_max`` the largest
    eigenvalue of ``-Lap_2`` from 50 seeded power iterations. Otherwise that
    value is scaled by ``(max_q |grad f0| + regularization)^(2 - p)`` and
    clamped to ``[1e-12, 1e3]``. The result is halved until one step from
    ``f0`` does not increase the p-energy.
    """
    _require_general(sys)
    f0 = _check_len(f0, sys.n_vertices, "f0")
    if regularization is None:
        regularization = DEFAULT_REGULARIZATION if p < 2 else 0.0
    tau = _base_step(sys, p, f0, regularization, seed)
    g0 = gradient(sys, f0)
    e0 = energy_from_gradient(sys, g0, p)
    lap = sys.div @ phi(g0, p, regularization)
    for _ in range(MAX_HALVINGS):
        if _energy_ok(energy_from_gradient(sys, gradient(sys, f0 + tau * lap), p), e0):
            break
        tau *= 0.5
    return max(tau, TAU_MIN)


class _Stepper:
    """Forward-Euler stepping with optional per-step energy backtracking."""

    def __init__(self, sys, cfg, f, mask=None):
        self.sys, self.p, self.reg = sys, float(cfg.p), cfg.reg
        self.auto = cfg.tau is None
        self.mask = mask
        self.tau = (
            estimate_step_size(sys, self.p, f, self.reg, cfg.seed) if self.auto else float(cfg.tau)
        )
        self.set_state(f)

    def set_state(self, f):
        self.f = f
        self.g = self.sys.grad @ f
        self.energy = energy_from_gradient(self.sys, self.g, self.p)
        self.lap = self.sys.div @ phi(self.g, self.p, self.reg)
        if self.mask is not None:
            self.lap[~self.mask] = 0.0

    def propose(self):
        """Next state (not yet accepted) and its gradient."""
        while True:
            f_new = self.f + self.tau * self.lap
            g_new = self.sys.grad @ f_new
            if not self.auto or self.tau <= TAU_MIN:
                return f_new, g_new
            if _energy_ok(energy_from_gradient(self.sys, g_new, self.p), self.energy):
                return f_new, g_new
            self.tau = max(self.tau * 0.5, TAU_MIN)


def _record(trace, n, change, sys, f, g, p, energy):
    trace.append(TraceRecord(n, float(change), float(energy), _wmean(sys, f), _rq(sys, f, g, p)))


def neumann_flow(sys: IncidenceSystem, f0, cfg: FlowConfig | None = None) -> FlowResult:
    """Iterate ``f_{n+1} = f_n + tau Lap_p f_n`` until the relative change
    ``||f_{n+1} - f_n||_2 / max(||f_n||_2, 1e-30)`` drops below the tolerance.

    The returned state is the last accepted iterate ``f_n``; ``iterations`` is
    ``n``. On hitting the cap the result has ``converged=False``.
    """
    cfg = cfg or FlowConfig()
    _require_general(sys)
    f = _check_len(f0, sys.n_vertices, "f0").astype(float, copy=True)
    st = _Stepper(sys, cfg, f)
    trace: list[TraceRecord] = []
    for n in range(cfg.max_iterations + 1):
        if n == cfg.max_iterations:
            _record(trace, n, float("nan"), sys, st.f, st.g, st.p, st.energy)
            return FlowResult(st.f, n, False, st.tau, trace)
        f_new, _ = st.propose()
        change = np.linalg.norm(f_new - st.f) / max(np.linalg.norm(st.f), 1e-30)
        if n % cfg.record_every == 0 or change < cfg.tolerance:
            _record(trace, n, change, sys, st.f, st.g, st.p, st.energy)
        if change < cfg.tolerance:
            return FlowResult(st.f, n, True, st.tau, trace)
        st.set_state(f_new)
    raise AssertionError("unreachable")


def _center_normalize(sys: IncidenceSystem, f: np.ndarray) -> tuple[np.ndarray, float]:
    g = f - _wmean(sys, f)
    nrm = _wnorm(sys, g)
    return (g / nrm if nrm > 0 else g), nrm


def renormalized_flow(sys: IncidenceSystem, f0, cfg: FlowConfig | None = None) -> FlowResult:
    """Flow of the rescaled quantity ``g = (f - mean) / ||f - mean||_V``.

    Each Euler step is taken from the current ``g`` and the result is
    re-centred and re-normalised, which keeps the iterate at unit scale for
    every ``p``. For ``p == 2`` and equal ``tau`` this yields exactly the
    rescaled iterates of :func:`neumann_flow`. The automatic step is half the
    CFL estimate so that the second eigenfunction, not the most oscillatory
    one, dominates the limit. Stops when ``||g_{n+1} - g_n||_2`` is below the
    tolerance; the returned state has weighted mean 0 and unit weighted norm.
    """
    cfg = cfg or FlowConfig()
    _require_general(sys)
    f0 = _check_len(f0, sys.n_vertices, "f0").astype(float, copy=True)
    g, nrm = _center_normalize(sys, f0)
    if nrm <= 1e-14 * max(1.0, float(np.max(np.abs(f0)))):
        raise DegenerateInitialError("initial state is constant")
    p, reg = float(cfg.p), cfg.reg
    if cfg.tau is None:
        # Half the CFL step keeps every amplification factor 1 - tau*lambda in
        # [0.1, 1]. With the full step, factors near -0.8 can outlast the
        # second mode and the normalised iterate locks onto the top eigenvector.
        tau = RENORMALIZED_STEP_FACTOR * estimate_step_size(sys, p, g, reg, cfg.seed)
    else:
        tau = float(cfg.tau)
    trace: list[TraceRecord] = []
    grad_g = sys.grad @ g
    for n in range(cfg.max_iterations + 1):
        e = energy_from_gradient(sys, grad_g, p)
        if n == cfg.max_iterations:
            _record(trace, n, float("nan"), sys, g, grad_g, p, e)
            return FlowResult(g, n, False, tau, trace)
        step = g + tau * (sys.div @ phi(grad_g, p, reg))
        g_new, nrm = _center_normalize(sys, step)
        if nrm == 0.0:
            raise DegenerateInitialError("flow collapsed onto a constant state")
        change = float(np.linalg.norm(g_new - g))
        if n % cfg.record_every == 0 or change < cfg.tolerance:
            _record(trace, n, change, sys, g, grad_g, p, e)
        if change < cfg.tolerance:
            return FlowResult(g, n, True, tau, trace)
        g = g_new
        grad_g = sys.grad @ g
    raise AssertionError("unreachable")


def interior_residual(sys: IncidenceSystem, f, bc: BoundaryCondition, p: float, reg: float = 0.0) -> float:
    """``max_{interior} |Lap_p f|``."""
    mask = bc.interior_mask(sys.n_vertices)
    return float(np.max(np.abs(p_laplacian(sys, f, p, reg)[mask])))


def dirichlet_solve(
    sys: IncidenceSystem, f0, bc: BoundaryCondition, cfg: FlowConfig | None = None
) -> FlowResult:
    """Explicit flow on interior vertices with boundary values held fixed.

    Converged once ``max_interior |Lap_p f| <= tolerance * max_j |F_j|`` (the
    scale falls back to 1 when all boundary values are 0). Boundary entries
    of the result equal the prescribed values exactly.
    """
    cfg = cfg or FlowConfig()
    _require_general(sys)
    mask = bc.interior_mask(sys.n_vertices)
    f = _check_len(f0, sys.n_vertices, "f0").astype(float, copy=True)
    f[bc.vertices] = bc.values
    scale = float(np.max(np.abs(bc.values)))
    if scale == 0.0:
        scale = 1.0
    limit = cfg.tolerance * scale
    st = _Stepper(sys, cfg, f, mask=mask)
    trace: list[TraceRecord] = []
    prev_change = float("nan")
    for n in range(cfg.max_iterations + 1):
        residual = float(np.max(np.abs(st.lap[mask])))
        if residual <= limit:
            _record(trace, n, prev_change, sys, st.f, st.g, st.p, st.energy)
            return FlowResult(st.f, n, True, st.tau, trace)
        if n == cfg.max_iterations:
            _record(trace, n, prev_change, sys, st.f, st.g, st.p, st.energy)
            return FlowResult(st.f, n, False, st.tau, trace)
        f_new, _ = st.propose()
        f_new[bc.vertices] = bc.values
        prev_change = np.linalg.norm(f_new - st.f) / max(np.linalg.norm(st.f), 1e-30)
        if n % cfg.record_every == 0:
            _record(trace, n, prev_change, sys, st.f, st.g, st.p, st.energy)
        st.set_state(f_new)
    raise AssertionError("unreachable")
