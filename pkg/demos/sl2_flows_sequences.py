"""Geodesic and horocycle flows through the finite model on right-invariant forms.

Only the three forms w0, w+, w- are used.  What the model knows about
the compact quotient comes from the Betti numbers of the genus-g surface.
"""

from flowforms import sl2
from flowforms.complex import cohomology_table, cokernel_complex
from flowforms.models import derive_operator_tables, jordan_profile
from flowforms.sequences import cokernel_long_sequence, cokernel_cohomology_dims, basic_h1_comparison

geo = sl2("sl2-geodesic", genus=2)
print("geodesic model:")
for name, dims in cohomology_table(geo).items():
    print(f"  {name:<16}{dims}")

cc = cokernel_complex(geo)
print("  cokernel complex dims", cc.dims, "d_C squared is zero:", cc.squares_vanish)

# With external Betti data the long exact sequence pins down H_C only up to one relation.
r = cokernel_long_sequence(geo)
print("  H_C constraints:", r.constraints)
print("  index identity holds:", r.extra["index_identity"]["holds"])

print("\ncomparison of H^1 basic (model versus surface):")
for k, v in basic_h1_comparison(geo).items():
    print(f"  {k}: {v}")

horo = sl2("sl2-horocycle-plus", genus=2)
print("\nhorocycle-plus: Lie derivative on 1-forms, ranks of powers", jordan_profile(horo.matrix("lie", 1)))
r = cokernel_long_sequence(horo)
print("  H^j_C =", cokernel_cohomology_dims(r))

print("\noperator table comparison:")
for kind in ("sl2-geodesic", "sl2-horocycle-plus"):
    t = derive_operator_tables(sl2(kind))
    print(" ", kind, t.counts())
    for d in t.diffs:
        if d.status != "match":
            print("     ", d.op, d.argument, "derived", d.derived, f"({d.status})")
