"""Pure-numpy implementations of the hot kernels.

Every function here has a numba twin in ``_kernels_numba`` with the exact
same signature and bit-identical output; ``kernels`` picks one of the two
at import time. Float expressions are kept in the same per-element order
in both backends so results do not depend on the backend.
"""

import numpy as np

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


def splitmix64_fill(seed, n):
    """First ``n`` outputs of the splitmix64 stream started at ``seed``.

    The k-th state is seed + k * golden-gamma (mod 2**64), so the whole
    stream vectorizes as an elementwise mix over a counter array.
    """
    ks = np.arange(1, n + 1, dtype=np.uint64)
    z = seed + ks * _GOLD
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def joint_counts(cols, cards):
    """Histogram of joint codes over the columns, row-major in column order.

    Rows containing a negative entry (the missing marker) are skipped.
    """
    n, k = cols.shape
    size = 1
    for j in range(k):
        size *= int(cards[j])
    valid = cols[(cols >= 0).all(axis=1)]
    code = np.zeros(valid.shape[0], dtype=np.int64)
    for j in range(k):
        code = code * cards[j] + valid[:, j]
    return np.bincount(code, minlength=size).astype(np.int64)


def ancestral_states(topo_cols, par_cols, par_off, par_strides, cdf_flat,
                     row_off, cards, uniforms):
    """Inverse-CDF ancestral sampling; one uniform per (row, topo position)."""
    n = uniforms.shape[0]
    n_nodes = topo_cols.shape[0]
    states = np.zeros((n, n_nodes), dtype=np.int64)
    for t in range(n_nodes):
        col = int(topo_cols[t])
        k = int(cards[col])
        ridx = np.zeros(n, dtype=np.int64)
        for pi in range(int(par_off[t]), int(par_off[t + 1])):
            ridx += states[:, par_cols[pi]] * par_strides[pi]
        start = int(row_off[t]) + ridx * k
        rows = cdf_flat[start[:, None] + np.arange(k, dtype=np.int64)[None, :]]
        st = (rows <= uniforms[:, t:t + 1]).sum(axis=1)
        np.minimum(st, k - 1, out=st)
        states[:, col] = st
    return states


def full_evidence_scores(topo_cols, par_cols, par_off, par_strides, table_flat,
                         row_off, cards, data, class_col, class_card):
    """Unnormalized class scores for rows observing every non-class variable.

    With all other variables fixed, the posterior over the class is
    proportional to the chain-rule product with the class column swapped
    to each candidate state in turn.
    """
    n = data.shape[0]
    n_nodes = topo_cols.shape[0]
    scores = np.ones((n, class_card), dtype=np.float64)
    for c in range(class_card):
        for t in range(n_nodes):
            col = int(topo_cols[t])
            k = int(cards[col])
            ridx = np.zeros(n, dtype=np.int64)
            for pi in range(int(par_off[t]), int(par_off[t + 1])):
                pcol = int(par_cols[pi])
                if pcol == class_col:
                    ridx += c * int(par_strides[pi])
                else:
                    ridx += data[:, pcol] * par_strides[pi]
            if col == class_col:
                child = c
            else:
                child = data[:, col]
            scores[:, c] *= table_flat[int(row_off[t]) + ridx * k + child]
    return scores
