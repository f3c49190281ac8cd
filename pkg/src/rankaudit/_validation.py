"""Input validation helpers shared by the estimators and the CLI."""

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .graph import Graph, NormMode
from .losses import LossFunction, parse_loss
from .solvers import TeleportSpec


def as_graph(X, directed=None, norm_mode=NormMode.COLUMN_STOCHASTIC):
    """Coerce estimator input into a :class:`Graph`.

    Accepts a Graph (returned as-is), or a square adjacency in the
    conventional orientation (``M[i, j]`` is the arc ``i -> j``) as a scipy
    sparse matrix or a 2-d array. ``directed=None`` infers directedness
    from symmetry of the adjacency.
    """
    if isinstance(X, Graph):
        return X
    if sp.issparse(X):
        mat = sp.csc_matrix(X, dtype=np.float64)
    else:
        arr = np.asarray(X, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError(
                f"adjacency must be 2-dimensional, got shape {arr.shape}")
        mat = sp.csc_matrix(arr)
    if mat.shape[0] != mat.shape[1]:
        raise ValidationError(
            f"adjacency must be square, got shape {mat.shape}")
    if directed is None:
        directed = (mat != mat.T).nnz != 0
    return Graph.from_adjacency(mat, directed=directed, norm_mode=norm_mode)


def check_budget(k, minimum=1):
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < minimum:
        raise ValidationError(
            f"budget k must be an integer >= {minimum}, got {k!r}")
    return int(k)


def check_damping(c):
    if c is None:
        return None
    c = float(c)
    if not 0.0 < c < 1.0:
        raise ValidationError(f"damping must lie in (0, 1), got {c}")
    return c


def check_tol(tol):
    tol = float(tol)
    if not tol > 0.0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    return tol


def resolve_loss(loss):
    if loss is None:
        return parse_loss("l2sq")
    if isinstance(loss, LossFunction):
        return loss
    return parse_loss(loss)


def resolve_teleport(teleport, graph):
    """Coerce a teleport argument: spec, 'uniform', 'node:<label>' or vector."""
    if teleport is None or (isinstance(teleport, str) and teleport == "uniform"):
        return TeleportSpec.uniform()
    if isinstance(teleport, TeleportSpec):
        return teleport
    if isinstance(teleport, str):
        if teleport.startswith("node:"):
            return TeleportSpec.single_node(graph.node_id(teleport[5:]))
        raise ValidationError(
            f"unknown teleport spec {teleport!r}; expected 'uniform', "
            "'node:<label>' or a TeleportSpec")
    return TeleportSpec.personalized(teleport)
