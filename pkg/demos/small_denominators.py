"""Solving (dx + a dy) f = g on the 2-torus, and why the slope matters.

Each frequency (m, n) is divided by 2*pi*i*(m + a*n).  For the golden
ratio these numbers shrink like 1/|n|.  For a Liouville-type slope they can be
astronomically small.
"""

import numpy as np

from flowforms.fourier import (
    FourierSeries,
    denominator_law,
    diophantine_profile,
    min_denominator,
    solve_cohomological,
)

for slope in ("golden", "(1+sqrt(2))/1", "liouville:4"):
    p = diophantine_profile(slope, depth=12)
    print(f"{slope:>14}: cf {p.coefficients[:8]}  measure estimate {p.measure_estimate:.2f}")

print("\nsmallest |m + a n| with max(|m|,|n|) <= N")
for N in (10, 10 ** 3, 10 ** 6):
    g = min_denominator("golden", N)
    lv = min_denominator("liouville:4", N)
    print(f"  N = {N:>7}: golden {g.value:.3e} at {g.frequency}   liouville {lv.value:.3e} at {lv.frequency}")

law = denominator_law("golden", 10 ** 6)
print(f"\ngolden ratio: |n| * |m + a n| >= {law.c_by_n:.5f} (1/sqrt(5) = {1 / np.sqrt(5):.5f})")

rng = np.random.default_rng(0)
g = FourierSeries.random_real(32, rng)
f, diag = solve_cohomological("golden", g)
print("\nrandom real series, N = 32:", diag.as_dict())
print("solution stays real:", f.is_conjugate_symmetric(1e-15))

# a nonzero mean is the single obstruction
g.coeffs[(0, 0)] = 0.5
f, diag = solve_cohomological("golden", g, subtract_mean=True)
print("with mean 0.5 removed first, residual", diag.residual)
