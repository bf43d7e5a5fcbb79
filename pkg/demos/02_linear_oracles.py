# Regularizers and their linear-minimization oracles.
#
# Each regularizer R solves min_beta c^T beta + R(beta) exactly and in
# closed form. For indicator regularizers that is linear optimization over
# the ball; the quadratic-over-ball variant is the strongly convex member
# that unlocks the geometric rate.

import numpy as np

from fwbench import L1Ball, L2Ball, QuadBall, Simplex, synth_dataset

c = np.array([3.0, -1.0, 2.0])

l1 = L1Ball(5.0)
print("l1 oracle:", l1.linear_oracle(c), "(one signed vertex)")
print("l1 conjugate R*(c) =", l1.conjugate(c), "(= delta * max|c_k|)")

l2 = L2Ball(1.0)
print("\nl2 oracle:", l2.linear_oracle(np.array([3.0, 4.0])), "(-c/||c||)")

qb = QuadBall(mu=1.0, rho=1.0)
print("\nquadball oracle:", qb.linear_oracle(np.array([2.0, 0.0])),
      "(unconstrained -c/mu clipped to the ball)")
print("quadball strong modulus:", qb.strong_modulus)

sx = Simplex(2.0)
print("\nsimplex oracle:", sx.linear_oracle(c), "(cheapest vertex)")
print("note: the simplex excludes the origin, so the stochastic solvers",
      "refuse it; it exists for the oracle suite and deterministic use.")

# The prediction bound M = max_j max_{beta in dom R} |x_j^T beta| is the
# instance constant entering every certificate.
ds = synth_dataset(50, 10, 1.0, loss="logistic", seed=7)
for reg in (l1, l2, qb):
    print(type(reg).__name__, "prediction bound:", reg.max_abs_prediction(ds))
