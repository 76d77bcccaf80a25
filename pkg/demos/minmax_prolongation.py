# The small eigenvalue principle on a nested pair of torus grids
#
# If a linear map Phi from a coarse space into a fine one satisfies
#   |Phi y|^2 >= alpha |y|^2   and   q(Phi y) <= beta q(y),
# then lambda_k(fine) <= (beta / alpha) lambda_k(coarse) for every k.
# Linear interpolation from a grid to its refinement preserves both forms
# exactly, so alpha = beta = 1 and the fine eigenvalues sit below the coarse ones.

# %%
import numpy as np

from geodspec import assemble, generate_torus_mesh, minmax_compare, torus_prolongation

periods, m, k = (2.0, 3.0), 4, 6
coarse = generate_torus_mesh(periods, m, k)
fine = generate_torus_mesh(periods, 2 * m, 2 * k)
P = torus_prolongation(m, k)
print("prolongation:", P.shape, "rows sum to one:", np.allclose(P.sum(axis=1), 1))

# %%
report = minmax_compare(assemble(coarse.metric_complex), assemble(fine.metric_complex), P)
print(f"alpha = {report.alpha:.12f}, beta = {report.beta:.12f}")
print("violations:", report.violations)

# %%
print(" k   coarse     fine")
for j in range(8):
    print(f"{j:>2} {report.lambda_1[j]:8.4f} {report.lambda_2[j]:8.4f}")

# %%
# Scaling the map multiplies alpha and beta by the same factor, so the bound
# only depends on the shape of Phi, not its size.
rep2 = minmax_compare(assemble(coarse.metric_complex), assemble(fine.metric_complex), 0.5 * P)
print(f"map 0.5 P: alpha = {rep2.alpha:.4f}, beta = {rep2.beta:.4f}, "
      f"violations {rep2.violations}")
