"""Sparse labelled datasets: LIBSVM text parsing, synthetic generators, and
the three row kernels (row inner product, sparse axpy, weighted column sum)
that every solver in this package is built on.
"""

import numpy as np
from scipy import sparse


class DatasetError(ValueError):
    """Malformed input text or inconsistent dataset arrays."""


class Dataset:
    """Immutable design matrix in compressed sparse row form plus labels.

    Row ``j`` stores the nonzero features of sample ``j`` as (column, value)
    pairs with strictly ascending, 0-based column indices.  The underlying
    arrays are frozen after construction so a single Dataset can be shared
    by any number of concurrent solver runs.

    Attributes
    ----------
    n, p : int
        Sample count and feature count.
    y : ndarray, shape (n,)
        Labels (+-1 for classification losses, real for regression).
    indptr, indices, data : ndarray
        CSR layout; row j occupies positions ``indptr[j]:indptr[j+1]``.
    X : scipy.sparse.csr_matrix
        The same storage exposed as a scipy matrix for batched products.
    """

    def __init__(self, y, indptr, indices, data, p):
        y = np.ascontiguousarray(y, dtype=np.float64)
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int64)
        data = np.ascontiguousarray(data, dtype=np.float64)
        n = y.shape[0]
        p = int(p)
        if n < 1 or p < 1:
            raise DatasetError("dataset needs n >= 1 samples and p >= 1 features")
        if indptr.shape != (n + 1,) or indptr[0] != 0 or indptr[-1] != indices.size:
            raise DatasetError("inconsistent CSR row pointers")
        if np.any(np.diff(indptr) < 0):
            raise DatasetError("CSR row pointers must be non-decreasing")
        if indices.size != data.size:
            raise DatasetError("indices/data length mismatch")
        if indices.size and (indices.min() < 0 or indices.max() >= p):
            raise DatasetError("column index out of range [0, p)")
        for j in range(n):
            row = indices[indptr[j]:indptr[j + 1]]
            if row.size > 1 and np.any(np.diff(row) <= 0):
                raise DatasetError(
                    "row %d: column indices must be strictly ascending" % j
                )

        self.n = n
        self.p = p
        self.y = y
        self.indptr = indptr
        self.indices = indices
        self.data = data
        self.X = sparse.csr_matrix((data, indices, indptr), shape=(n, p))

        # Per-row norm maxima drive the prediction bound of every regularizer.
        max_inf = 0.0
        max_l2_sq = 0.0
        for j in range(n):
            vals = data[indptr[j]:indptr[j + 1]]
            if vals.size:
                max_inf = max(max_inf, float(np.max(np.abs(vals))))
                max_l2_sq = max(max_l2_sq, float(vals @ vals))
        self.max_row_inf = max_inf
        self.max_row_l2 = float(np.sqrt(max_l2_sq))
        self.max_sq_row_norm = max_l2_sq

        for arr in (self.y, self.indptr, self.indices, self.data):
            arr.flags.writeable = False

    @property
    def nnz(self):
        return int(self.indices.size)

    def row(self, j):
        """(indices, values) view of row j. Views are read-only."""
        if not 0 <= j < self.n:
            raise IndexError("sample index %d out of range [0, %d)" % (j, self.n))
        lo, hi = self.indptr[j], self.indptr[j + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def __repr__(self):
        return "Dataset(n=%d, p=%d, nnz=%d)" % (self.n, self.p, self.nnz)


def row_dot(ds, j, beta):
    """Inner product of row j with a dense vector, summing stored nonzeros only."""
    idx, vals = ds.row(j)
    return float(vals @ beta[idx])


def axpy_row(d, ds, j, coeff):
    """In-place ``d += coeff * x_j`` touching only row j's nonzero columns."""
    idx, vals = ds.row(j)
    d[idx] += coeff * vals
    return d


def weighted_columns(ds, w):
    """Average of rows weighted by w, i.e. ``(1/n) X^T w``."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (ds.n,):
        raise DatasetError("weights must have length n=%d" % ds.n)
    return (ds.X.T @ w) / ds.n


def parse_libsvm(text, expect_binary_labels=False, n_features=None):
    """Parse LIBSVM text (``<label> <idx>:<val> ...``, 1-based indices).

    Feature count is the largest index seen unless ``n_features`` supplies a
    larger value.  With ``expect_binary_labels`` the two raw label values are
    remapped to {-1, +1}, smaller raw value to -1.  Blank lines are skipped;
    ``\\r\\n`` line ends are accepted.  Duplicate or non-ascending indices
    within a line are rejected rather than silently merged.
    """
    if hasattr(text, "read"):
        text = text.read()
    labels = []
    indptr = [0]
    indices = []
    data = []
    max_index = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            labels.append(float(tokens[0]))
        except ValueError:
            raise DatasetError("line %d: bad label %r" % (lineno, tokens[0]))
        prev = 0
        for tok in tokens[1:]:
            idx_s, _, val_s = tok.partition(":")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise DatasetError("line %d: bad feature token %r" % (lineno, tok))
            if idx < 1:
                raise DatasetError("line %d: indices are 1-based, got %d" % (lineno, idx))
            if idx <= prev:
                raise DatasetError(
                    "line %d: indices must be strictly ascending (%d after %d)"
                    % (lineno, idx, prev)
                )
            prev = idx
            indices.append(idx - 1)
            data.append(val)
        indptr.append(len(indices))
        max_index = max(max_index, prev)
    if not labels:
        raise DatasetError("empty file: no samples")
    p = max(max_index, n_features or 0)
    if p < 1:
        raise DatasetError("no features seen and no n_features override given")
    y = np.asarray(labels)
    if expect_binary_labels:
        uniq = np.unique(y)
        if uniq.size > 2:
            raise DatasetError(
                "expected binary labels, found %d distinct values" % uniq.size
            )
        if uniq.size == 1:
            if uniq[0] not in (-1.0, 1.0):
                raise DatasetError("single-class file with non +-1 label")
        else:
            y = np.where(y == uniq[0], -1.0, 1.0)
    return Dataset(y, indptr, indices, data, p)


def load_libsvm(path, expect_binary_labels=False, n_features=None):
    """Read a LIBSVM file from disk. See ``parse_libsvm``."""
    with open(path, "r") as fh:
        return parse_libsvm(fh, expect_binary_labels, n_features)


def to_libsvm(ds):
    """Serialize to LIBSVM text (1-based indices, round-trip float format)."""
    lines = []
    for j in range(ds.n):
        idx, vals = ds.row(j)
        parts = ["%.17g" % ds.y[j]]
        parts.extend("%d:%.17g" % (k + 1, v) for k, v in zip(idx, vals))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def synth_dataset(n, p, density, loss="logistic", seed=0):
    """Reproducible sparse Gaussian instance with planted-model labels.

    Each of the n*p entries is present with probability ``density`` and drawn
    from N(0, 1).  Labels come from a planted linear model: the sign of the
    clean score for logistic, the score plus N(0, 0.1^2) noise for squared.
    """
    if not 0.0 < density <= 1.0:
        raise DatasetError("density must lie in (0, 1]")
    if n < 1 or p < 1:
        raise DatasetError("need n, p >= 1")
    if loss not in ("logistic", "squared"):
        raise DatasetError("unknown loss kind %r" % loss)
    rng = np.random.Generator(np.random.PCG64(seed))
    mask = rng.random((n, p)) < density
    values = rng.standard_normal((n, p))
    beta_star = rng.standard_normal(p) / np.sqrt(p)
    indptr = [0]
    indices = []
    data = []
    for j in range(n):
        cols = np.flatnonzero(mask[j])
        indices.extend(cols.tolist())
        data.extend(values[j, cols].tolist())
        indptr.append(len(indices))
    scores = (values * mask) @ beta_star
    if loss == "logistic":
        y = np.where(scores >= 0.0, 1.0, -1.0)
    else:
        y = scores + 0.1 * rng.standard_normal(n)
    return Dataset(y, indptr, indices, data, p)


def synth_onehot_dataset(n, group_sizes, seed=0, label_flip=0.02):
    """Categorical one-hot instance: one active column per attribute group.

    Every sample activates exactly one column inside each group (value 1.0),
    mimicking one-hot encoded categorical survey data.  Labels follow a
    planted sparse linear rule over the indicator columns with a fraction
    ``label_flip`` of them flipped.
    """
    group_sizes = [int(g) for g in group_sizes]
    if n < 1 or not group_sizes or min(group_sizes) < 1:
        raise DatasetError("need n >= 1 and positive group sizes")
    rng = np.random.Generator(np.random.PCG64(seed))
    offsets = np.concatenate([[0], np.cumsum(group_sizes)])
    p = int(offsets[-1])
    k = len(group_sizes)
    cols = np.empty((n, k), dtype=np.int64)
    for g, size in enumerate(group_sizes):
        # Skewed category frequencies, as in real categorical data.
        weights = rng.random(size) + 0.15
        weights /= weights.sum()
        cols[:, g] = offsets[g] + rng.choice(size, size=n, p=weights)
    cols.sort(axis=1)
    indices = cols.ravel()
    data = np.ones(n * k)
    indptr = np.arange(n + 1, dtype=np.int64) * k
    # Planted rule: a handful of strongly informative indicator columns.
    rule = np.zeros(p)
    informative = rng.choice(p, size=max(4, p // 8), replace=False)
    rule[informative] = rng.standard_normal(informative.size) * 2.0
    scores = rule[cols].sum(axis=1)
    scores -= np.median(scores)
    y = np.where(scores >= 0.0, 1.0, -1.0)
    flips = rng.random(n) < label_flip
    y[flips] = -y[flips]
    return Dataset(y, indptr, indices, data, p)


# Attribute-group layout of the vendored benchmark stand-in: 22 categorical
# attributes one-hot encoded into 112 indicator columns.
MUSHROOMS_LIKE_GROUPS = (6, 4, 10, 2, 9, 2, 2, 2, 12, 2, 5, 4, 4, 9, 9, 1, 4, 3, 5, 9, 6, 2)


def mushrooms_like(seed=0):
    """Synthetic stand-in with the shape of the LIBSVM ``mushrooms`` set.

    8124 samples, 112 one-hot indicator features in 22 attribute groups, and
    a nearly separable two-class labelling.  Used by the offline benchmark
    suite; any real LIBSVM file can be substituted through the CLI.
    """
    return synth_onehot_dataset(8124, MUSHROOMS_LIKE_GROUPS, seed=seed, label_flip=0.02)
