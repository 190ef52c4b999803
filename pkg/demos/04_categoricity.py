# %% [markdown]
# # Isomorphisms between UHF presentations
#
# Two certificates with the same supernatural number are interleaved by
# divisibility; the induced maps glue to an effective isomorphism.

# %%
from cstark.categoricity import interleave, iso_approx
from cstark.formats import format_point, parse_point
from cstark.uhf import exact_trace, presentation_from_dims

A, a = presentation_from_dims(lambda j: 2 ** j, "2^inf")
B, b = presentation_from_dims(lambda j: 4 ** j, "4^inf")
il = interleave(a, b, 6)
for row in il.table():
    print("j=%d  k=%d m=%d  l=%d n=%d" % row)

# %%
for text in ("1", "u(1,1,1)", "u(2,1,3) + 1/2*u(1,2,2)"):
    pt = parse_point(text, A)
    img = iso_approx(a, b, pt, 8)
    print(f"{text:26s} -> {format_point(img.element):40s} trace {exact_trace(img.element)}")

# %% [markdown]
# Mismatched supernatural numbers surface as a suspicion after a bounded
# search, never as a verdict.

# %%
from cstark.errors import SupernaturalMismatchSuspected

_, c = presentation_from_dims(lambda j: 3 ** j, "3^inf")
try:
    interleave(a, c, 3, fuel=20)
except SupernaturalMismatchSuspected as exc:
    print("suspected:", exc)
