"""Dense reference computations for small instances.

Nothing here touches the sparse incidence system: the 2-Laplacian matrix is
rebuilt entry by entry from the hypergraph and the exponents, and the
eigensolver is a plain cyclic Jacobi iteration. These are the independent
oracles the flows and operators are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import OrientedHypergraph
from .errors import NoConvergenceError, SingularSystemError, TooLargeError

MAX_DENSE_VERTICES = 2000
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12


@dataclass
class DenseOperator:
    """Matrix of ``f -> -Lap_2 f`` plus the diagonal making it self-adjoint.

    ``weight_diagonal`` is ``w_I^alpha`` for the general variant and the
    vertex degree for the simplified one; in both cases
    ``D^(1/2) A D^(-1/2)`` is symmetric. Note the simplified operator has the
    opposite sign convention, so its spectrum is non-positive.
    """

    matrix: np.ndarray
    weight_diagonal: np.ndarray

    def symmetrized(self) -> np.ndarray:
        s = np.sqrt(self.weight_diagonal)
        return s[:, None] * self.matrix / s[None, :]


def _arc_coefficients(h, q, exps, simplified):
    """Per-vertex (gradient, divergence) weights of hyperarc q.

    Both exclude the hyperarc factors, which the caller applies.
    """
    alpha, _, _, eps, eta = exps
    arc = h.hyperarcs[q]
    n_in, n_out = len(arc.in_set), len(arc.out_set)
    coeffs = {}
    for v in arc.in_set:
        if simplified:
            coeffs[v] = (1.0, 1.0 / h.degree[v])
        else:
            coeffs[v] = (
                h.w_I[v] ** alpha * h.w_G[v] ** eps / n_in,
                -(h.w_G[v] ** eps) / n_in,
            )
    for v in arc.out_set:
        if simplified:
            coeffs[v] = (-1.0, -1.0 / h.degree[v])
        else:
            coeffs[v] = (
                -(h.w_I[v] ** alpha) * h.w_G[v] ** eta / n_out,
                h.w_G[v] ** eta / n_out,
            )
    return coeffs


def dense_laplacian(sys) -> DenseOperator:
    """Materialise ``-Lap_2`` as an ``N x N`` array.

    Entry ``(i, k)`` is ``-sum_q d_q(i) W_I^beta W_G^(2 gamma) g_q(k)``; column
    ``j`` is therefore ``-Lap_2 e_j``.

    Raises
    ------
    TooLargeError
        If ``N`` exceeds 2000.
    """
    from .operators import Variant

    h: OrientedHypergraph = sys.hypergraph
    prm = sys.params
    n = h.n_vertices
    if n > MAX_DENSE_VERTICES:
        raise TooLargeError(f"{n} vertices exceeds the dense limit {MAX_DENSE_VERTICES}")
    simplified = prm.variant is Variant.SIMPLIFIED
    exps = prm.exponents()
    A = np.zeros((n, n))
    for q in range(h.n_hyperarcs):
        coeffs = _arc_coefficients(h, q, exps, simplified)
        factor = 1.0 if simplified else h.W_I[q] ** prm.beta * h.W_G[q] ** (2 * prm.gamma)
        for i, (_, d) in coeffs.items():
            for k, (g, _) in coeffs.items():
                A[i, k] -= d * factor * g
    if simplified:
        diag = h.degree.astype(float)
    else:
        diag = h.w_I ** prm.alpha
    return DenseOperator(A, np.asarray(diag, dtype=float))


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Stops once the off-diagonal Frobenius norm is at most
    ``tol * max(1, ||a||_F)``.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Orthonormal eigenvectors as columns.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        if _offdiag_norm(a) > target:
            raise NoConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigendecomposition(op: DenseOperator):
    """Full spectrum of ``op``.

    Eigenvectors are mapped back from the symmetrised matrix and normalised
    in the weighted inner product, i.e. ``V.T @ diag(D) @ V == I``.
    """
    w, u = jacobi_eigh(op.symmetrized())
    v = u / np.sqrt(op.weight_diagonal)[:, None]
    return w, v


def nullspace_dimension(op: DenseOperator, tol: float = 1e-9) -> int:
    """Numerical nullity of the 2-Laplacian (eigenvalues within ``tol`` of 0,
    relative to the spectral radius)."""
    w, _ = eigendecomposition(op)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    return int(np.sum(np.abs(w) <= tol * scale))


def dirichlet_linear_solve(op: DenseOperator, bc) -> np.ndarray:
    """Solve ``Lap_2 f = 0`` on the interior with ``f = F_j`` on the boundary.

    Raises
    ------
    SingularSystemError
        If the interior block is numerically singular.
    """
    n = op.matrix.shape[0]
    mask = bc.interior_mask(n)
    interior = np.flatnonzero(mask)
    a_ii = op.matrix[np.ix_(interior, interior)]
    a_ib = op.matrix[np.ix_(interior, bc.vertices)]
    rhs = -a_ib @ bc.values
    if np.linalg.cond(a_ii) > 1e12:
        raise SingularSystemError("interior block is singular")
    f = np.zeros(n)
    f[bc.vertices] = bc.values
    f[interior] = np.linalg.solve(a_ii, rhs)
    return f
