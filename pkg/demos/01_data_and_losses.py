# Datasets and loss families.
#
# Everything downstream works on one immutable object: a row-sparse design
# matrix with labels. Rows come from LIBSVM text or a seeded generator, and
# three kernels (row inner product, sparse axpy, weighted column average)
# are the only data operations any solver needs.

import numpy as np

from fwbench import (
    axpy_row, make_loss, parse_libsvm, row_dot, synth_dataset, to_libsvm,
    weighted_columns,
)

# Parse two samples of LIBSVM text. Indices are 1-based on disk, 0-based
# in memory; labels {1, 2} are remapped to {-1, +1}.
ds = parse_libsvm("2 1:0.5 3:2\n1 2:1\n", expect_binary_labels=True)
print("parsed:", ds, "labels:", ds.y)

beta = np.array([2.0, 9.0, 1.0])
print("x_0 . beta =", row_dot(ds, 0, beta))

d = np.zeros(ds.p)
axpy_row(d, ds, 0, 0.5)          # d += 0.5 * x_0, touching 2 entries
print("after axpy:", d)

w = np.array([1.0, -1.0])
print("(1/n) X^T w =", weighted_columns(ds, w))

# Text round-trips exactly.
assert parse_libsvm(to_libsvm(ds)).data.tolist() == ds.data.tolist()

# Loss families carry values, derivatives, and conjugates. The conjugate
# pair drives the dual solver and every duality-gap certificate.
lf = make_loss("logistic", ds.y)
print("\nlogistic loss at s=0:", lf.value(0, 0.0), "(= ln 2)")
print("derivative at s=0:  ", lf.deriv(0, 0.0))
print("conjugate at w=-1/2:", lf.conj_value(0, -0.5), "(= -ln 2)")

# deriv and conj_deriv invert each other on the domain interior
s = 1.7
print("round trip:", lf.conj_deriv(0, lf.deriv(0, s)), "== ", s)

# and values stay finite far outside the interesting range
print("loss at s=1000:", lf.value(0, 1000.0), "(no overflow)")

# Synthetic instances are reproducible by seed.
synth = synth_dataset(n=100, p=20, density=0.3, loss="logistic", seed=7)
print("\nsynthetic:", synth, "mean nnz/row:", np.diff(synth.indptr).mean())
