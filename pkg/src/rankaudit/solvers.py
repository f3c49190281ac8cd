"""Fixed-point solvers for the ranking vector and its adjoint resolvent.

The ranking vector solves ``r = c*A*r + (1-c)*e`` and the adjoint helper
solves ``x = c*A'*x + b``, i.e. ``x = (I - c*A')^{-1} b``. Both run the
same Jacobi-style sweep so every result is a deterministic function of its
inputs. Residuals are the actually measured L1 difference between the
returned iterate and one further application of the update map.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ._kernels import fixed_point_solve
from .errors import ConvergenceError, ValidationError

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1000

_DISTRIBUTION_TOL = 1e-12


@dataclass(frozen=True)
class RankVector:
    """Converged ranking scores plus solver metadata."""

    values: np.ndarray
    residual: float
    iterations: int

    def __post_init__(self):
        self.values.flags.writeable = False

    def to_csv(self, labels):
        """Serialize as ``node_label,score`` lines."""
        lines = ["node_label,score"]
        lines.extend(f"{lab},{float(val)!r}"
                     for lab, val in zip(labels, self.values))
        return "\n".join(lines) + "\n"


class TeleportSpec:
    """Restart distribution for the ranking solve.

    ``uniform``/``personalized``/``single_node`` are probability
    distributions (non-negative, summing to one within 1e-12).
    ``raw`` skips the distribution checks: the adjoint solve feeds loss
    gradients through the same machinery and those are not distributions.
    """

    def __init__(self, kind, payload=None):
        self.kind = kind
        self.payload = payload

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def personalized(cls, distribution):
        vec = np.asarray(distribution, dtype=np.float64)
        if vec.ndim != 1:
            raise ValidationError("personalized teleport must be a vector")
        if not np.all(np.isfinite(vec)):
            raise ValidationError("teleport vector must be finite")
        if vec.min(initial=0.0) < 0.0:
            raise ValidationError("teleport distribution must be non-negative")
        if abs(vec.sum() - 1.0) > _DISTRIBUTION_TOL:
            raise ValidationError(
                f"teleport distribution must sum to 1 (got {vec.sum()!r})")
        return cls("personalized", vec)

    @classmethod
    def single_node(cls, node):
        return cls("single", int(node))

    @classmethod
    def raw(cls, vector):
        vec = np.asarray(vector, dtype=np.float64)
        if not np.all(np.isfinite(vec)):
            raise ValidationError("teleport vector must be finite")
        return cls("raw", vec)

    @property
    def is_distribution(self):
        return self.kind != "raw"

    def vector(self, n):
        if self.kind == "uniform":
            return np.full(n, 1.0 / n)
        if self.kind == "single":
            if not 0 <= self.payload < n:
                raise ValidationError(
                    f"teleport node {self.payload} out of range for n={n}")
            vec = np.zeros(n)
            vec[self.payload] = 1.0
            return vec
        vec = self.payload
        if len(vec) != n:
            raise ValidationError(
                f"teleport vector has length {len(vec)}, graph has {n} nodes")
        return vec.copy()

    def describe(self):
        if self.kind == "uniform":
            return "uniform"
        if self.kind == "single":
            return f"node:{self.payload}"
        return self.kind

    def __repr__(self):
        return f"TeleportSpec({self.describe()})"


def _check_solver_args(c, tol, max_iter):
    if not 0.0 < c < 1.0:
        raise ValidationError(f"damping must lie in (0, 1), got {c}")
    if not tol > 0.0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter}")


def spectral_radius_estimate(graph, iters=100):
    """Power-iteration estimate of the dominant eigenvalue magnitude.

    Iterates the diagonally shifted operator ``I + A`` (spectrum shifted by
    one for a non-negative matrix), which dodges oscillation on periodic
    structures; column-stochastic graphs without dangling columns converge
    to 1 immediately. An edgeless graph reports 0.
    """
    mat = graph.matrix()
    if mat.nnz == 0:
        return 0.0
    v = np.full(graph.n, 1.0 / graph.n)
    est = 0.0
    for _ in range(iters):
        w = mat @ v + v
        total = float(w.sum())
        if total <= 0.0:
            return 0.0
        est = total - 1.0
        v = w / total
    return est


def default_damping(graph, iters=100):
    """Half the inverse dominant eigenvalue, clamped into (0, 1).

    This is the auto-selection rule used by the greedy auditors when no
    damping is supplied; for a column-stochastic graph it evaluates to 0.5.
    """
    rho = spectral_radius_estimate(graph, iters)
    if rho <= 0.0:
        return 0.99
    return float(min(max(0.5 / rho, 1e-3), 0.99))


def _warn_if_contraction_doubtful(graph, c):
    mat = graph.matrix()
    if mat.nnz == 0:
        return
    max_colsum = float(np.max(mat.sum(axis=0)))
    if c * max_colsum < 1.0:
        return
    rho = spectral_radius_estimate(graph)
    if c * rho >= 1.0:
        warnings.warn(
            f"damping {c} times estimated spectral radius {rho:.6g} is >= 1; "
            "the ranking iteration may not converge", RuntimeWarning,
            stacklevel=3)


def pagerank(graph, teleport=None, c=None, tol=DEFAULT_TOL,
             max_iter=DEFAULT_MAX_ITER):
    """Solve the ranking fixed point ``r = c*A*r + (1-c)*e``.

    ``c=None`` picks :func:`default_damping`. Raises
    :class:`ConvergenceError` carrying the last residual when ``max_iter``
    sweeps do not reach ``tol``.
    """
    if teleport is None:
        teleport = TeleportSpec.uniform()
    if c is None:
        c = default_damping(graph)
    _check_solver_args(c, tol, max_iter)
    _warn_if_contraction_doubtful(graph, c)
    e_vec = teleport.vector(graph.n)
    b = (1.0 - c) * e_vec
    csr = graph._csr
    x, resid, sweeps = fixed_point_solve(
        csr.indptr, csr.indices, csr.data, b, c, b.copy(), tol, max_iter)
    if sweeps < 0:
        raise ConvergenceError(
            f"ranking solve did not reach tol={tol} within {max_iter} "
            f"iterations (residual {resid:.3e})", residual=resid,
            iterations=max_iter)
    return RankVector(values=x, residual=float(resid), iterations=int(sweeps))


def resolvent_transpose_apply(graph, b, c, tol=DEFAULT_TOL,
                              max_iter=DEFAULT_MAX_ITER):
    """Apply ``(I - c*A')^{-1}`` to ``b`` via the fixed point ``x = c*A'*x + b``.

    Equivalent to a personalized ranking solve on the reverse graph with a
    raw (not necessarily distributional) restart vector.
    """
    _check_solver_args(c, tol, max_iter)
    b = np.ascontiguousarray(np.asarray(b, dtype=np.float64))
    if b.shape != (graph.n,):
        raise ValidationError(
            f"vector has shape {b.shape}, expected ({graph.n},)")
    if not np.all(np.isfinite(b)):
        raise ValidationError("vector must be finite")
    # The CSC arrays of A are exactly the CSR arrays of A'.
    csc = graph._csc
    x, resid, sweeps = fixed_point_solve(
        csc.indptr, csc.indices, csc.data, b, c, b.copy(), tol, max_iter)
    if sweeps < 0:
        raise ConvergenceError(
            f"adjoint solve did not reach tol={tol} within {max_iter} "
            f"iterations (residual {resid:.3e})", residual=resid,
            iterations=max_iter)
    return x
