#!/usr/bin/env python3
"""Walk through the fixed-number Fock machinery: sector enumeration,
dimension counting, and the sparse mode operators."""

import numpy as np

from twowell import (
    a_mode,
    b_mode,
    dimension,
    enumerate_sector,
    hopping_operator,
    number_operator,
    truncated_ladder,
)

# A sector collects every occupation vector of the 2n modes (n levels in
# well a, then n in well b) with a fixed total atom number N.
sector = enumerate_sector(2, 2)
print(f"n = 2 levels, N = 2 atoms: dimension {sector.dim}")
print("basis (descending lexicographic):")
for state in sector.basis:
    print("  ", state)

# The counting formula C(2n - 1 + N, N) matches the enumeration.
for n in (1, 2, 3):
    for N in (0, 2, 5):
        assert dimension(n, N) == enumerate_sector(n, N).dim
print("\ndimension(n, N) == len(basis) for n <= 3, N <= 5")

# Number operators are diagonal; hopping operators move one quantum and
# carry the usual sqrt matrix elements.
n_a1 = number_operator(sector, a_mode(1))
print("\nN_a1 diagonal:", n_a1.diagonal())

hop = hopping_operator(sector, b_mode(1), a_mode(1))
src = sector.index[(1, 0, 1, 0)]
dst = sector.index[(0, 0, 2, 0)]
print(f"<0,0,2,0| b1^dag a1 |1,0,1,0> = {hop[dst, src]:.6f}  (sqrt(2))")

# The transpose exchanges creation and annihilation roles.
assert (hop.T - hopping_operator(sector, a_mode(1), b_mode(1))).nnz == 0
print("hop(b1 <- a1)^T == hop(a1 <- b1)")

# Truncated single-well ladders: canonical commutation holds exactly below
# the occupation cutoff.
ladders = truncated_ladder(2, 3)
print(f"\ntruncated ladder space (2 modes, cutoff 3): dimension {ladders.dim}")
comm = (ladders.ann[0] @ ladders.cre[0] - ladders.cre[0] @ ladders.ann[0]).toarray()
sub = ladders.totals <= 2
gap = np.max(np.abs(comm[np.ix_(sub, sub)] - np.eye(ladders.dim)[np.ix_(sub, sub)]))
print(f"|[a_1, a_1^dag] - 1| below cutoff: {gap:.2e}")
