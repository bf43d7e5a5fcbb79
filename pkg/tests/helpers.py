"""Shared samplers and brute-force oracles for the test suite."""

import numpy as np

from fwbench import Dataset


def rng_for(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_l1_point(rng, p, delta):
    """Uniform-ish point of the l1 ball: Dirichlet magnitudes, random signs,
    radius shrunk by u^(1/p)."""
    mags = rng.dirichlet(np.ones(p))
    signs = rng.choice([-1.0, 1.0], size=p)
    r = delta * rng.random() ** (1.0 / p)
    return r * mags * signs


def random_l2_point(rng, p, radius):
    v = rng.standard_normal(p)
    v /= np.linalg.norm(v)
    return radius * rng.random() ** (1.0 / p) * v


def random_simplex_point(rng, p, delta):
    return delta * rng.dirichlet(np.ones(p))


def random_feasible(rng, reg, p):
    """A random point of dom R for any regularizer variant."""
    name = type(reg).__name__
    if name == "L1Ball":
        return random_l1_point(rng, p, reg.delta)
    if name == "L2Ball":
        return random_l2_point(rng, p, reg.delta)
    if name == "Simplex":
        return random_simplex_point(rng, p, reg.delta)
    if name == "QuadBall":
        return random_l2_point(rng, p, reg.rho)
    raise AssertionError(name)


def dense_matrix(ds):
    return ds.X.toarray()


def dataset_from_dense(y, dense):
    """Build a Dataset from a dense array, keeping explicit nonzeros only."""
    dense = np.asarray(dense, dtype=float)
    n, p = dense.shape
    indptr = [0]
    indices = []
    data = []
    for j in range(n):
        cols = np.flatnonzero(dense[j])
        indices.extend(cols.tolist())
        data.extend(dense[j, cols].tolist())
        indptr.append(len(indices))
    return Dataset(np.asarray(y, float), indptr, indices, data, p)
