"""Numba implementations of the hot kernels; twins of ``_kernels_numpy``.

All arithmetic stays in uint64 / int64 / float64 and mirrors the numpy
backend's per-element operation order, so both backends are bit-identical.
"""

import numpy as np
from numba import njit

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True)
def splitmix64_fill(seed, n):
    out = np.empty(n, dtype=np.uint64)
    state = seed
    for i in range(n):
        state = state + _GOLD
        z = state
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        out[i] = z ^ (z >> _S31)
    return out


@njit(cache=True)
def joint_counts(cols, cards):
    n, k = cols.shape
    size = 1
    for j in range(k):
        size *= cards[j]
    counts = np.zeros(size, dtype=np.int64)
    for i in range(n):
        code = 0
        ok = True
        for j in range(k):
            v = cols[i, j]
            if v < 0:
                ok = False
                break
            code = code * cards[j] + v
        if ok:
            counts[code] += 1
    return counts


@njit(cache=True)
def ancestral_states(topo_cols, par_cols, par_off, par_strides, cdf_flat,
                     row_off, cards, uniforms):
    n = uniforms.shape[0]
    n_nodes = topo_cols.shape[0]
    states = np.zeros((n, n_nodes), dtype=np.int64)
    for i in range(n):
        for t in range(n_nodes):
            col = topo_cols[t]
            k = cards[col]
            ridx = 0
            for pi in range(par_off[t], par_off[t + 1]):
                ridx += states[i, par_cols[pi]] * par_strides[pi]
            base = row_off[t] + ridx * k
            u = uniforms[i, t]
            st = k - 1
            for j in range(k - 1):
                if cdf_flat[base + j] > u:
                    st = j
                    break
            states[i, col] = st
    return states


@njit(cache=True)
def full_evidence_scores(topo_cols, par_cols, par_off, par_strides, table_flat,
                         row_off, cards, data, class_col, class_card):
    n = data.shape[0]
    n_nodes = topo_cols.shape[0]
    scores = np.ones((n, class_card), dtype=np.float64)
    for i in range(n):
        for c in range(class_card):
            s = 1.0
            for t in range(n_nodes):
                col = topo_cols[t]
                k = cards[col]
                ridx = 0
                for pi in range(par_off[t], par_off[t + 1]):
                    pcol = par_cols[pi]
                    if pcol == class_col:
                        ridx += c * par_strides[pi]
                    else:
                        ridx += data[i, pcol] * par_strides[pi]
                if col == class_col:
                    child = c
                else:
                    child = data[i, col]
                s *= table_flat[row_off[t] + ridx * k + child]
            scores[i, c] = s
    return scores
