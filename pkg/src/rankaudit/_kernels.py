"""Numba kernels shared by the solvers and the exhaustive-search fast path.

Everything here is written with plain sequential loops on purpose: the
package promises bit-reproducible results for identical inputs, and the
exhaustive oracle must produce the exact same floating-point values as the
regular solver path (same summation order, no FMA, no threading). Keep any
change to these loops mirrored across the functions below.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def fixed_point_solve(indptr, indices, data, b, c, x0, tol, max_iter):
    """Solve ``x = c*M*x + b`` by Jacobi-style fixed-point iteration.

    ``indptr``/``indices``/``data`` describe M in CSR form. Returns
    ``(x, residual, sweeps)`` where ``residual = ||x - (c*M*x + b)||_1`` for
    the returned iterate; ``sweeps == -1`` signals non-convergence and the
    caller is expected to raise.
    """
    n = b.shape[0]
    x = x0.copy()
    y = np.empty_like(x)
    resid = np.inf
    for sweep in range(1, max_iter + 1):
        for i in range(n):
            s = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                s += data[p] * x[indices[p]]
            y[i] = c * s + b[i]
        resid = 0.0
        for i in range(n):
            resid += abs(y[i] - x[i])
        if resid <= tol:
            return x, resid, sweep
        if not np.isfinite(resid):
            return y, resid, -1
        tmp = x
        x = y
        y = tmp
    return x, resid, -1


@njit(cache=True)
def column_sums(indptr, data):
    """Per-column sums of a CSC matrix, accumulated in storage order."""
    ncols = indptr.shape[0] - 1
    out = np.zeros(ncols)
    for j in range(ncols):
        s = 0.0
        for p in range(indptr[j], indptr[j + 1]):
            s += data[p]
        out[j] = s
    return out


@njit(cache=True)
def square_sum(x):
    """Sequential sum of squares; the canonical squared-L2 evaluation."""
    s = 0.0
    for i in range(x.shape[0]):
        s += x[i] * x[i]
    return s


@njit(cache=True)
def _solve_with_removed(csc_indptr, csc_indices, raw_data, perm,
                        csr_indptr, csr_indices, remove_pos, stochastic,
                        b, c, x0, tol, max_iter):
    """Ranking solve after zeroing ``remove_pos`` entries of the raw matrix.

    Re-normalizes every column from the surviving raw weights when
    ``stochastic`` is set, permutes the column-ordered data into row order
    via ``perm`` and runs the fixed-point solver. Explicit zeros left in the
    pattern are harmless: they add exact +0.0 terms to each row sum, so the
    result is bit-identical to a solve on the structurally reduced matrix.
    """
    data = raw_data.copy()
    for t in range(remove_pos.shape[0]):
        data[remove_pos[t]] = 0.0
    if stochastic:
        ncols = csc_indptr.shape[0] - 1
        for j in range(ncols):
            s = 0.0
            for p in range(csc_indptr[j], csc_indptr[j + 1]):
                s += data[p]
            if s > 0.0:
                for p in range(csc_indptr[j], csc_indptr[j + 1]):
                    data[p] = data[p] / s
    csr_data = np.empty_like(data)
    for t in range(perm.shape[0]):
        csr_data[t] = data[perm[t]]
    return fixed_point_solve(csr_indptr, csr_indices, csr_data, b, c, x0,
                             tol, max_iter)


@njit(cache=True)
def _next_combination(idx, npop, k):
    """Advance ``idx`` to the next k-combination in lexicographic order.

    Returns False once the last combination has been consumed.
    """
    i = k - 1
    while i >= 0 and idx[i] == npop - k + i:
        i -= 1
    if i < 0:
        return False
    idx[i] += 1
    for j in range(i + 1, k):
        idx[j] = idx[j - 1] + 1
    return True


@njit(cache=True)
def brute_best_subset(pos_table, pos_len, npop, k,
                      csc_indptr, csc_indices, raw_data, perm,
                      csr_indptr, csr_indices, stochastic,
                      b, c, x0, tol, max_iter, f_base):
    """Exhaustive squared-L2 search over k-subsets of precomputed elements.

    ``pos_table[e, :pos_len[e]]`` lists the raw-matrix positions removed by
    element ``e``. Subsets are visited in lexicographic order and ties keep
    the first (lexicographically smallest) optimum. Returns
    ``(best_idx, best_delta, ok)``; ``ok == 0`` flags a solver failure.
    """
    idx = np.arange(k)
    best_idx = idx.copy()
    best = -1.0
    width = pos_table.shape[1]
    remove_pos = np.empty(k * width, dtype=np.int64)
    while True:
        cnt = 0
        for t in range(k):
            e = idx[t]
            for q in range(pos_len[e]):
                remove_pos[cnt] = pos_table[e, q]
                cnt += 1
        x, resid, sweeps = _solve_with_removed(
            csc_indptr, csc_indices, raw_data, perm, csr_indptr, csr_indices,
            remove_pos[:cnt], stochastic, b, c, x0, tol, max_iter)
        if sweeps < 0:
            return best_idx, best, 0
        d = f_base - square_sum(x)
        delta = d * d
        if delta > best:
            best = delta
            best_idx[:] = idx
        if not _next_combination(idx, npop, k):
            break
    return best_idx, best, 1


@njit(cache=True)
def brute_best_node_subset(npop, k,
                           csc_indptr, csc_indices, raw_data, perm,
                           csr_indptr, csr_indices, stochastic,
                           b, c, x0, tol, max_iter, f_base):
    """Exhaustive squared-L2 search over k-node vertex-induced subgraphs.

    Removal set of a subset S is every arc with both endpoints in S.
    Same ordering and tie-break contract as :func:`brute_best_subset`.
    """
    n = csc_indptr.shape[0] - 1
    idx = np.arange(k)
    best_idx = idx.copy()
    best = -1.0
    member = np.zeros(n, dtype=np.bool_)
    remove_pos = np.empty(raw_data.shape[0], dtype=np.int64)
    while True:
        for t in range(k):
            member[idx[t]] = True
        cnt = 0
        for t in range(k):
            j = idx[t]
            for p in range(csc_indptr[j], csc_indptr[j + 1]):
                if member[csc_indices[p]]:
                    remove_pos[cnt] = p
                    cnt += 1
        x, resid, sweeps = _solve_with_removed(
            csc_indptr, csc_indices, raw_data, perm, csr_indptr, csr_indices,
            remove_pos[:cnt], stochastic, b, c, x0, tol, max_iter)
        for t in range(k):
            member[idx[t]] = False
        if sweeps < 0:
            return best_idx, best, 0
        d = f_base - square_sum(x)
        delta = d * d
        if delta > best:
            best = delta
            best_idx[:] = idx
        if not _next_combination(idx, npop, k):
            break
    return best_idx, best, 1
