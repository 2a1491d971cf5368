"""Basic cohomology of a linear flow on the n-torus.

The slopes are kept as symbols, so every rank below is the generic rank:
it holds for any choice of rationally independent slopes.
"""

from math import comb

from flowforms import torus
from flowforms.complex import basic_cohomology, invariant_cohomology, relative_H_X
from flowforms.sequences import seven_term_sequence

for n in range(2, 6):
    m = torus(n)
    basic = [basic_cohomology(m, k).dimension for k in range(n + 1)]
    inv = [invariant_cohomology(m, k).dimension for k in range(n + 1)]
    print(f"T^{n}: basic {basic}  invariant {inv}")
    assert basic[:n] == [comb(n - 1, k) for k in range(n)]

# The basic forms of T^3 in degree 1: combinations of dx_i killed by i_X.
m = torus(3)
print("\nbasic 1-forms on T^3:")
for v in basic_cohomology(m, 1).representative_elements():
    print("  ", m.format(v))

# H_X sits between the basic and the full de Rham groups.
print("\nrelative groups H^k_X on T^3:", [relative_H_X(m, k).dimension for k in range(4)])

# The seven-term sequence in every degree, node by node.
for k in range(-1, 3):
    r = seven_term_sequence(m, k)
    print(f"k = {k:>2}: dims {r.dims}  exact {r.passed}")
