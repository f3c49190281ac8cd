"""Loss functions over the ranking vector and their exact gradients."""

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp, softmax

from ._kernels import square_sum
from .errors import ValidationError

_SYMMETRY_TOL = 1e-12


class LossFunction:
    """Interface: a scalar ``value(r)`` and its dense ``gradient(r)``."""

    name = "loss"

    def value(self, r):
        raise NotImplementedError

    def gradient(self, r):
        raise NotImplementedError

    def describe(self):
        return self.name

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


class SquaredL2(LossFunction):
    """``f(r) = sum r_i^2`` with gradient ``2r``.

    Kept distinct from ``LpNorm(2)`` because the closed-form influence
    factorization bakes the factor-2 gradient in, and because the value is
    evaluated with the same sequential summation the exhaustive oracle
    uses, keeping the two code paths bit-identical.
    """

    name = "l2sq"

    def value(self, r):
        return float(square_sum(np.ascontiguousarray(r, dtype=np.float64)))

    def gradient(self, r):
        return 2.0 * np.asarray(r, dtype=np.float64)


class LpNorm(LossFunction):
    """``f(r) = ||r||_p`` for ``p >= 1``; undefined gradient at ``r = 0``."""

    def __init__(self, p):
        p = float(p)
        if not np.isfinite(p) or p < 1.0:
            raise ValidationError(f"p must be a finite real >= 1, got {p}")
        self.p = p

    @property
    def name(self):
        return f"lp:{self.p:g}"

    def value(self, r):
        r = np.asarray(r, dtype=np.float64)
        return float(np.sum(np.abs(r) ** self.p) ** (1.0 / self.p))

    def gradient(self, r):
        r = np.asarray(r, dtype=np.float64)
        norm = self.value(r)
        if norm == 0.0:
            raise ValidationError(
                "Lp gradient is undefined at the zero vector")
        # sign(r)*|r|^(p-1) / ||r||^(p-1); safe at r_i == 0 for p > 1.
        return np.sign(r) * np.abs(r) ** (self.p - 1.0) / norm ** (self.p - 1.0)


class SoftMax(LossFunction):
    """``f(r) = log sum exp(r_i)``; gradient is the softmax distribution."""

    name = "softmax"

    def value(self, r):
        return float(logsumexp(np.asarray(r, dtype=np.float64)))

    def gradient(self, r):
        return softmax(np.asarray(r, dtype=np.float64))


class EnergyNorm(LossFunction):
    """``f(r) = r' M r`` for a symmetric matrix ``M``; gradient ``(M + M')r``.

    Symmetry is checked here; positive definiteness is the caller's
    responsibility.
    """

    name = "energy"

    def __init__(self, matrix):
        m = sp.csr_matrix(matrix, dtype=np.float64)
        if m.shape[0] != m.shape[1]:
            raise ValidationError("energy-norm matrix must be square")
        asym = abs(m - m.T)
        if asym.nnz and asym.max() > _SYMMETRY_TOL:
            raise ValidationError("energy-norm matrix must be symmetric")
        self.matrix = m
        self._sym = (m + m.T).tocsr()

    def value(self, r):
        r = np.asarray(r, dtype=np.float64)
        if len(r) != self.matrix.shape[0]:
            raise ValidationError(
                f"energy-norm matrix is {self.matrix.shape[0]}x"
                f"{self.matrix.shape[0]}, ranking has length {len(r)}")
        return float(r @ (self.matrix @ r))

    def gradient(self, r):
        r = np.asarray(r, dtype=np.float64)
        return self._sym @ r


def parse_loss(text):
    """Parse the CLI loss spelling: l2sq | lp:<p> | softmax | energy:<file>."""
    if isinstance(text, LossFunction):
        return text
    token = str(text).strip()
    if token == "l2sq":
        return SquaredL2()
    if token == "softmax":
        return SoftMax()
    if token.startswith("lp:"):
        try:
            return LpNorm(float(token[3:]))
        except ValueError:
            raise ValidationError(f"invalid Lp exponent in {token!r}") from None
    if token.startswith("energy:"):
        return EnergyNorm(load_matrix(token[len("energy:"):]))
    raise ValidationError(
        f"unknown loss {token!r}; expected l2sq, lp:<p>, softmax or "
        "energy:<matrix-file>")


def load_matrix(path):
    """Load a square matrix: ``.npz`` (scipy sparse) or whitespace text."""
    if str(path).endswith(".npz"):
        return sp.load_npz(path)
    try:
        return np.loadtxt(path, dtype=np.float64, ndmin=2)
    except OSError:
        raise
    except Exception as exc:
        raise ValidationError(f"{path}: cannot parse matrix file: {exc}")
