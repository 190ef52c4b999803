# %% [markdown]
# # K_0 and K_1
#
# D(A) is presented by labels x_g for the enumerated projections p_{n,k};
# K_0 is its Grothendieck group.  For 2^∞ the kernel is decided by traces and
# K_0 is identified with the dyadic rationals.

# %%
from cstark.formats import format_label, parse_label
from cstark.ktheory import cone_decide, k0, k0_to_rational, unit_label
from cstark.uhf import presentation_from_dims

A, cert = presentation_from_dims(lambda j: 2 ** j, "2^inf")
K = k0(A)
one = unit_label(K)
print("[1] ->", k0_to_rational(K, one))

# %%
for text in ("x9", "x9 - x2", "x2 - x9", "x2*x9 - g(x9)"):
    w = parse_label(text, K)
    print(f"{text:16s} value {k0_to_rational(K, w)!s:6s} positive {cone_decide(K, w).answer.value}",
          "normal form", format_label(K, w))

# %% [markdown]
# ## Grothendieck group of (N+, +)
#
# x_i labels i + 1; the kernel compares a + d with b + c.

# %%
from cstark.presentations import SgWord, positive_integers
from cstark.ktheory import grothendieck

G = grothendieck(positive_integers(), cancellative=True)
w = lambda a: SgWord((a - 1,))  # noqa: E731
print(G.equal(G.pair_label(w(5), w(2)), G.pair_label(w(4), w(1))))
print(G.equal(G.pair_label(w(5), w(2)), G.pair_label(w(4), w(2))))

# %% [markdown]
# ## K_1(C) as K_0 of the suspension
#
# Members of the kernel subgroup are enumerated; each is checked against the
# identity with an explicit fuel budget.

# %%
from cstark.cstar import StandardComplex
from cstark.ktheory import k1

G1 = k1(StandardComplex())
for i in range(5):
    print(i, G1.member(i), G1.confirm_identity(i, 10 ** 5))
