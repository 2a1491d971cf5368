"""Matrix flows on SL(2, R) checked against the symbolic operator tables."""

import numpy as np

from flowforms.sl2_numeric import (
    bracket_check,
    closed_geodesic_period,
    flow,
    maurer_cartan_check,
    numeric_lie_check,
)

print("bracket relations:", bracket_check().errors)

print("\nflow(I, geodesic, 2) =\n", flow(np.eye(2), "geodesic", 2.0))

print("\nfinite-difference Lie derivatives vs symbolic values")
for kind in ("geodesic", "horocycle-plus", "horocycle-minus"):
    devs = [numeric_lie_check(k, kind).max_deviation for k in range(4)]
    print(f"  {kind:>16}: " + "  ".join(f"{d:.1e}" for d in devs))
print("  geodesic order ratio (4 means second order):", round(numeric_lie_check(1, "geodesic").order_ratio, 3))

print("\nMaurer-Cartan:", f"{maurer_cartan_check().max_deviation:.1e}")

# The period of w0 over a closed geodesic is its length.
P = np.array([[2.0, 1.0], [1.0, 1.0]])
for t in (1.0, 2.0, 4.0):
    h = P @ np.diag([np.exp(t / 2), np.exp(-t / 2)]) @ np.linalg.inv(P)
    r = closed_geodesic_period(h)
    print(f"  length {r.length:.6f}  integral of w0 {r.integral:.6f}  closing error {r.closing_error:.1e}")
