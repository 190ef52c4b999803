# %% [markdown]
# # UHF algebras from supernatural numbers
#
# A supernatural number is given by monotone stages.  Its direct-limit
# presentation has dims n_j and special points u(j, r, s), the images of the
# stage matrix units.

# %%
from fractions import Fraction

from cstark.formats import parse_point, parse_supernatural
from cstark.uhf import (extract_certificate, limit_norm, presentation_from_supernatural,
                        supernatural_from_certificate, trace)

eps = parse_supernatural("2 inf\n3 1\n")
A, cert = presentation_from_supernatural(eps)
print("dims", cert.dims(6))
print("2-adic stream", list(supernatural_from_certificate(cert, 2, 6)))
print("3-adic stream", list(supernatural_from_certificate(cert, 3, 6)))

# %% [markdown]
# Norms and traces of rational points are exact; the trace interval is
# widened to width 3·2^-k.

# %%
two, c2 = presentation_from_supernatural(parse_supernatural("2 inf\n"))
pt = parse_point("u(1,1,1) - u(2,1,1)", two)
iv = limit_norm(c2, pt, 16)
print("norm in", float(iv.lo), float(iv.hi))
for j in range(5):
    t = trace(c2, parse_point(f"u({j},1,1)", two), 16)
    print(j, t.contains(Fraction(1, 2 ** j)))

# %% [markdown]
# ## Recovering a certificate
#
# Extraction rebuilds nested matrix-unit systems from the presentation alone
# and checks the nesting and approximation invariants exactly.

# %%
ext = extract_certificate(two, stages=5)
print("dims", ext.dims)
print("matrix units", ext.verify_matrix_units(), "nesting", ext.verify_inv2(),
      "approximation", ext.verify_inv1())

# %% [markdown]
# ## Supernaturals driven by counter machines
#
# h_s(p_e) counts the inputs accepted by machine e within s steps.

# %%
from cstark.machines import ALWAYS, EVENS, NEVER
from cstark.uhf import hard_supernatural

hard = hard_supernatural([NEVER, ALWAYS, EVENS])
for s in (0, 5, 20, 100):
    print(s, hard.stage(s))
