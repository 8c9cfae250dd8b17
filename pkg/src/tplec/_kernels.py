"""Hot accumulation kernels, numba-compiled with a pure-numpy fallback.

The numba path walks each permutation once, updating pooled counts and
the running diversity sum per nonzero entry, with replicates spread over
threads. The numpy path computes per-replicate cumulative count matrices
instead. Set ``TPLEC_DISABLE_NUMBA=1`` in the environment to force the
numpy path; ``benchmarks/bench_accumulation.py`` compares the two.

Both paths evaluate the final accumulation step directly from the fully
pooled count vector, so every replicate ends on the bit-identical value.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("TPLEC_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in {"1", "true", "yes", "on"}

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via TPLEC_DISABLE_NUMBA")
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def hill_direct_numpy(pooled: np.ndarray, q: float) -> float:
    """q-order Hill number of one pooled count vector (caller validates)."""
    c = pooled[pooled > 0].astype(np.float64)
    n = c.sum()
    if q == 0.0:
        return float(c.size)
    if q == 1.0:
        s1 = float((c * np.log(c)).sum())
        return float(np.exp(np.log(n) - s1 / n))
    sq = float((c**q).sum())
    return float((sq / n**q) ** (1.0 / (1.0 - q)))


def accumulation_curves_numpy(
    counts: np.ndarray, perms: np.ndarray, q: float
) -> np.ndarray:
    """Per-step Hill numbers along each permutation, one row per replicate."""
    n_rep, n_steps = perms.shape
    out = np.empty((n_rep, n_steps), dtype=np.float64)
    final = hill_direct_numpy(counts.sum(axis=0), q)
    for r in range(n_rep):
        cum = np.cumsum(counts[perms[r]], axis=0)
        if q == 0.0:
            vals = np.count_nonzero(cum > 0, axis=1).astype(np.float64)
        else:
            cf = cum.astype(np.float64)
            n_k = cf.sum(axis=1)
            safe = np.where(cf > 0, cf, 1.0)
            if q == 1.0:
                s1 = (safe * np.log(safe)).sum(axis=1)
                vals = np.exp(np.log(n_k) - s1 / n_k)
            else:
                sq = np.where(cf > 0, cf**q, 0.0).sum(axis=1)
                vals = (sq / n_k**q) ** (1.0 / (1.0 - q))
        vals[n_steps - 1] = final
        out[r] = vals
    return out


def _csr(counts: np.ndarray):
    """Row-compressed view of the nonzero table entries."""
    rows, cols = np.nonzero(counts)
    data = counts[rows, cols].astype(np.float64)
    indptr = np.zeros(counts.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=counts.shape[0]), out=indptr[1:])
    return indptr, cols.astype(np.int64), data


if HAS_NUMBA:

    @njit(cache=True)
    def _hill_direct_nb(pooled, q):
        n = 0.0
        for v in pooled:
            n += v
        if q == 0.0:
            npos = 0.0
            for v in pooled:
                if v > 0.0:
                    npos += 1.0
            return npos
        if q == 1.0:
            s1 = 0.0
            for v in pooled:
                if v > 0.0:
                    s1 += v * np.log(v)
            return np.exp(np.log(n) - s1 / n)
        sq = 0.0
        for v in pooled:
            if v > 0.0:
                sq += v**q
        return (sq / n**q) ** (1.0 / (1.0 - q))

    @njit(parallel=True, cache=True)
    def _curves_nb(indptr, taxon, data, n_taxa, perms, q):
        n_rep, n_steps = perms.shape
        out = np.empty((n_rep, n_steps), dtype=np.float64)
        for r in prange(n_rep):
            pooled = np.zeros(n_taxa, dtype=np.float64)
            total = 0.0
            acc = 0.0  # richness, sum c*ln(c), or sum c**q depending on q
            for k in range(n_steps):
                s = perms[r, k]
                for p in range(indptr[s], indptr[s + 1]):
                    j = taxon[p]
                    add = data[p]
                    old = pooled[j]
                    new = old + add
                    pooled[j] = new
                    total += add
                    if q == 0.0:
                        if old == 0.0:
                            acc += 1.0
                    elif q == 1.0:
                        t_old = old * np.log(old) if old > 0.0 else 0.0
                        acc += new * np.log(new) - t_old
                    else:
                        t_old = old**q if old > 0.0 else 0.0
                        acc += new**q - t_old
                if q == 0.0:
                    out[r, k] = acc
                elif q == 1.0:
                    out[r, k] = np.exp(np.log(total) - acc / total)
                else:
                    out[r, k] = (acc / total**q) ** (1.0 / (1.0 - q))
            out[r, n_steps - 1] = _hill_direct_nb(pooled, q)
        return out

    def hill_direct_numba(pooled: np.ndarray, q: float) -> float:
        return float(_hill_direct_nb(np.asarray(pooled, dtype=np.float64), q))

    def accumulation_curves_numba(
        counts: np.ndarray, perms: np.ndarray, q: float
    ) -> np.ndarray:
        indptr, taxon, data = _csr(counts)
        return _curves_nb(
            indptr, taxon, data, counts.shape[1], np.ascontiguousarray(perms), q
        )

    hill_direct = hill_direct_numba
    accumulation_curves = accumulation_curves_numba
else:
    hill_direct_numba = None
    accumulation_curves_numba = None
    hill_direct = hill_direct_numpy
    accumulation_curves = accumulation_curves_numpy
