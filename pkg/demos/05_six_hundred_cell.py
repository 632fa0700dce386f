"""The 600-cell: a large simplicial test case with an Einstein-like metric.

Vertices are the 120 unit quaternions of the binary icosahedral group,
edges join nearest neighbours, faces and tetrahedra are the 3- and
4-cliques.  With all lengths equal, every edge carries the same small
positive curvature and the metric has constant scalar curvature in both
normalizations.
"""

import numpy as np

import regge3 as r

c = r.six_hundred_cell()
print("600-cell counts (V, E, F, T):", c.counts())
print("Euler characteristic:", c.euler_characteristic())
print("edge degrees: all", int(c.edge_degrees.min()), "to",
      int(c.edge_degrees.max()))

ones = np.ones(720)
rep = r.functionals(c, ones)
expect = 2 * np.pi - 5 * np.arccos(1 / 3)
print(f"\nedge curvature K_e = {rep.k_edge[0]:.10f}")
print(f"   closed form 2pi - 5 arccos(1/3) = {expect:.10f}")
print(f"EHR = {rep.ehr:.6f}   LEHR = {rep.lehr:.6f}   VEHR = {rep.vehr:.6f}")

for which in ("L", "V"):
    res = np.abs(r.csc_residual(c, ones, which)).max()
    print(f"csc residual ({which}): {res:.2e}")

b = r.bounds_report(c, ones)
print(f"\nmax edge degree {b.max_edge_degree} gives the bound "
      f"{b.lehr_lower:.6f} <= LEHR <= {b.lehr_upper:.6f}")
print(f"(-3 pi = {-3 * np.pi:.6f}); actual LEHR = {b.lehr:.6f}")

print("\nround-trips through the explicit triangulation format:")
text = r.format_complex(c)
print(f"  document size {len(text) // 1024} KiB; reload equal:",
      r.parse_complex(text) == c)
