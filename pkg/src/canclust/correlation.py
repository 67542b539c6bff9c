"""Pairwise Pearson correlation of resampled signals and its dissimilarity form.

Rows of a SignalMatrix are centered and unit-norm, so the correlation matrix
is just the Gram matrix of the rows. The clustering input is a dissimilarity:
by default d = 1 - |rho|, which treats strongly anti-correlated signals
(brake vs. accelerator style pairs) as close; d = (1 - rho) / 2 is available
for sign-sensitive analysis.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class CorrelationMatrix:
    signal_ids: tuple
    rho: np.ndarray  # N x N, symmetric, unit diagonal, entries in [-1, 1]


@dataclass(frozen=True)
class DissimilarityMatrix:
    signal_ids: tuple
    d: np.ndarray  # N x N, symmetric, zero diagonal, entries in [0, 1]


def pearson_matrix(m):
    """Pearson correlation matrix of the rows of a SignalMatrix.

    Rows are already centered and unit-norm, so rho[i, j] is the plain dot
    product; entries are computed once for i < j and mirrored, the diagonal
    is set (not computed) to exactly 1.
    """
    n = m.data.shape[0]
    if n < 2:
        raise DataError(f"{m.capture_id}: need at least 2 signals to correlate, got {n}")
    if m.data.shape[1] < 2:
        raise DataError(f"{m.capture_id}: need at least 2 samples per signal")
    norms = np.linalg.norm(m.data, axis=1)
    # constant rows are pruned upstream; a zero-norm row here is a bug
    assert np.all(norms > 0), "zero-variance row reached pearson_matrix"

    gram = m.data @ m.data.T
    rho = np.zeros_like(gram)
    iu = np.triu_indices(n, k=1)
    rho[iu] = np.clip(gram[iu], -1.0, 1.0)
    rho = rho + rho.T
    np.fill_diagonal(rho, 1.0)
    return CorrelationMatrix(signal_ids=tuple(m.signal_ids), rho=rho)


def to_dissimilarity(c, mode="one_minus_abs_rho"):
    """Turn a correlation matrix into the clustering dissimilarity.

    mode "one_minus_abs_rho" gives d = 1 - |rho| (default);
    mode "half_one_minus_rho" gives d = (1 - rho) / 2.
    """
    if mode == "one_minus_abs_rho":
        d = 1.0 - np.abs(c.rho)
    elif mode == "half_one_minus_rho":
        d = (1.0 - c.rho) / 2.0
    else:
        raise ValueError(f"unknown dissimilarity mode {mode!r}")
    d = np.clip(d, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    return DissimilarityMatrix(signal_ids=tuple(c.signal_ids), d=d)


def dump_matrix_csv(signal_ids, matrix, path):
    """Write a labeled square matrix as CSV (debug aid for rho / d)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("," + ",".join(signal_ids) + "\n")
        for sid, row in zip(signal_ids, matrix):
            fh.write(sid + "," + ",".join(repr(float(v)) for v in row) + "\n")
