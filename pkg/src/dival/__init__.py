"""dival: divisor functions in arithmetic progressions, computed exactly.

Library layout:

  arith        factorization, tau_k, modular inverses, the parameter system
  sieve        segmented tables of tau_k / mu / phi / Lambda / 1 on [lo, hi]
  characters   Dirichlet character groups, conductors, character sums
  discrepancy  exact Delta(f; X, d, a), the moduli family, box decomposition
  expsums      Ramanujan / Kloosterman / min-sum / three-variable sums
  variance     empirical variance vs the predicted a_k * gamma_k * X (log d)^(k^2-1)
  bilinear     hyperbola pair sums E(f1, f2; X, d, a)
  acceptance   the runnable acceptance-criteria registry
  cli          the `dival` command
"""

__version__ = "0.1.0"
