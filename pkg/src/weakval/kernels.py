"""Counting kernels for blocks of Monte Carlo trials.

Each kernel turns a block of uniforms into per-cell counts. Cells are laid out
as ``2 * s_index + phi_index`` with index 0 for +1 and 1 for -1.
"""

import numpy as np

from ._accel import USE_NUMBA, optional_njit


@optional_njit
def categorical_counts_loop(u, cdf):
    counts = np.zeros(cdf.shape[0], dtype=np.int64)
    last = cdf.shape[0] - 1
    for i in range(u.shape[0]):
        k = 0
        while k < last and u[i] >= cdf[k]:
            k += 1
        counts[k] += 1
    return counts


def categorical_counts_numpy(u, cdf):
    idx = np.searchsorted(cdf[:-1], u, side="right")
    return np.bincount(idx, minlength=cdf.shape[0]).astype(np.int64)


@optional_njit
def classical_counts_loop(u, heads_prob, report_plus, flip):
    """``u`` has shape (n, 3): toss, report, flip.

    ``report_plus`` is Pr(s=+1 | Heads); ``flip[k]`` is the flip probability
    after report index k. Tails trials are only counted. Returns
    ``[n_failed, c0, c1, c2, c3]``.
    """
    out = np.zeros(5, dtype=np.int64)
    for i in range(u.shape[0]):
        heads = u[i, 0] < heads_prob
        if not heads:
            out[0] += 1
            continue
        s_idx = 0 if u[i, 1] < report_plus else 1
        phi_idx = 1 if u[i, 2] < flip[s_idx] else 0
        out[1 + 2 * s_idx + phi_idx] += 1
    return out


def classical_counts_numpy(u, heads_prob, report_plus, flip):
    heads = u[:, 0] < heads_prob
    ub = u[heads]
    s_idx = np.where(ub[:, 1] < report_plus, 0, 1)
    phi_idx = np.where(ub[:, 2] < flip[s_idx], 1, 0)
    cells = np.bincount(2 * s_idx + phi_idx, minlength=4)
    return np.concatenate([[u.shape[0] - ub.shape[0]], cells]).astype(np.int64)


if USE_NUMBA:
    categorical_counts = categorical_counts_loop
    classical_counts = classical_counts_loop
    BACKEND = "numba"
else:
    categorical_counts = categorical_counts_numpy
    classical_counts = classical_counts_numpy
    BACKEND = "numpy"
