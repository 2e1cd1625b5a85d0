"""A tour of the six-qubit resource state and its decomposition identities.

The whole protocol rests on one state: a genuinely maximally entangled
six-qubit vector with 32 equal-magnitude terms. This script prints its
structure and certifies every algebraic identity the security arguments
lean on.
"""

import numpy as np

from qpcsim import IdentityId, identity_suite, make_psi6qb
from qpcsim.bpb import bell_triple_distribution, encode

s = make_psi6qb()
print("qubit labels:", s.labels)
print("norm:", s.norm())

nonzero = np.flatnonzero(np.abs(s.amps) > 1e-15)
print(f"{len(nonzero)} nonzero terms, all with |amplitude| = 1/sqrt(32):")
row = []
for i in nonzero:
    sign = "+" if s.amps[i].real > 0 else "-"
    row.append(f"{sign}|{i:06b}>")
for start in range(0, len(row), 8):
    print("  ", " ".join(row[start:start + 8]))

# every ket has an even number of 0s -- the fingerprint of this state
zeros = {bin(i)[2:].zfill(6).count("0") for i in nonzero}
print("zero-counts appearing in the support:", sorted(zeros))

print("\nidentity suite (residual = ||state - decomposition||):")
for ident, residual in identity_suite().items():
    print(f"  {ident.value:22s} {residual:.3e}")

print("\nthree-Bell-pair decomposition over pairs (1,2), (3,4), (6,5):")
for term in bell_triple_distribution():
    blocks = [str(encode(r)) for r in (term.r12, term.r34, term.r65)]
    sign = "+" if term.sign > 0 else "-"
    print(f"  {sign} {term.r12.value:4s} {term.r34.value:4s} "
          f"{term.r65.value:4s}   key blocks {' '.join(blocks)}   "
          f"XOR = 00")
