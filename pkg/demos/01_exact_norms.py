# %% [markdown]
# # Exact matrices and certified norms
#
# Entries are Gaussian rationals.  Operator norms come back as dyadic
# intervals, certified by Sturm root isolation on the characteristic
# polynomial of M*M.

# %%
from fractions import Fraction

from cstark.exact import ExactMatrix, GaussianRational, certified_opnorm, norm_bounds

M = ExactMatrix.from_rows([
    [1, GaussianRational(0, 2), Fraction(1, 3)],
    [0, -1, 2],
    [Fraction(3, 4), 0, GaussianRational(1, 1)],
])
print(M)

# %%
for k in (4, 10, 20):
    iv = certified_opnorm(M, k)
    print(k, float(iv.lo), float(iv.hi), "width <= 2^-k:", iv.hi - iv.lo <= Fraction(1, 1 << k))

# %% [markdown]
# The cheap bounds bracket the norm: largest entry modulus below, sum of
# entry moduli above.

# %%
lo, hi = norm_bounds(M)
print(float(lo), "<=", float(certified_opnorm(M, 20).lo), "<=", float(hi))

# %% [markdown]
# ## Projections in matrix algebras
#
# Murray-von Neumann equivalence in M_n(C) is decided by rank, with an
# explicit partial isometry as witness.

# %%
from cstark.matrix_fd import diagonal_projection, mvn_decide_fd, spectral_round_to_projection

P = ExactMatrix.from_rows([[Fraction(9, 25), Fraction(12, 25)], [Fraction(12, 25), Fraction(16, 25)]])
v = mvn_decide_fd(P, diagonal_projection([0, 1]))
print(v.verdict, "ranks", v.rank_p, v.rank_q, "witness ok:", v.witness.verify(P, ExactMatrix.diag([0, 1])))

# %%
near = ExactMatrix.diag([Fraction(51, 50), Fraction(-1, 40)])
r = spectral_round_to_projection(near)
print("exact projection:", r.exact)
