"""Discrete conformal classes: factor map, cross ratios, csc metrics.

A conformal class is given by background lengths; per-vertex factors f
rescale each edge by exp((f_v + f_v')/2).  Within the class of the
equal-length metric there are at least two constant scalar curvature
metrics: the equal-length metric itself and a second, non-equihedral one.
"""

import numpy as np

import regge3 as r

dt = r.double_tetrahedron()
cls = r.ConformalClass(dt, np.ones(6))

print("cross ratios are conformal invariants:")
f = np.array([0.3, -0.2, 0.1, -0.4])
lengths, ok = cls.apply(f)
print("  factors", f, "-> lengths", np.round(lengths, 4))
print("  cross ratios:", r.cross_ratios(dt, lengths)[0], "(background: [1, 1])")

print("\nclosed-form equihedral point of the class with one long edge:")
cls12 = r.ConformalClass(dt, np.array([1, 1, 1, 1, 1, 1.2]))
pt = r.equihedral_point(cls12)
print("  factors:", np.round(pt.factors, 6), " (log 1.2 =", round(np.log(1.2), 6), ")")
print("  induced lengths:", np.round(pt.lengths, 6))
print("  opposite pairs equal:", r.is_equihedral(dt, pt.lengths, tol=1e-12),
      " admissible:", pt.admissible)

print("\nNewton solve for constant scalar curvature in the unit class:")
fa, tra = r.solve_csc(cls, "L", np.zeros(4))
print(f"  from 0:            factors {np.round(fa, 6)}  ({tra.reason}, "
      f"residual {tra.residual_norms[-1]:.1e})")
fb, trb = r.solve_csc(cls, "L", np.array([-1.0, -1.0, 0.0, 0.0]))
print(f"  from (-1,-1,0,0):  factors {np.round(fb - fb[2:].mean(), 6)}  "
      f"({trb.reason}, residual {trb.residual_norms[-1]:.1e})")
lb, _ = cls.apply(fb)
print(f"  second point is not equihedral: lengths {np.round(lb, 4)}")
print(f"  LEHR at the two csc points: {r.lehr_value(dt, np.ones(6)):.6f} "
      f"vs {r.lehr_value(dt, lb):.6f}")

print("\nconformal Hessian of the length-normalized functional (per-vertex")
print("log scale factors) at the equal-length metric:")
H = r.lehr_conformal_hessian_csc(dt, np.ones(6))
print("  eigenvalues:", np.round(r.eig_sym(H).eigenvalues, 9),
      " (4 sqrt2 / 9 =", round(4 * np.sqrt(2) / 9, 9), ")")

print("\nconvexity within the class is lost along the equihedral family:")
for t in (1.3, 1.35):
    lam2 = r.conformal_direction_eigenvalue(dt, r.diagonal_family(t), [1, 1, -1, -1])
    print(f"  t = {t}: eigenvalue along (1,1,-1,-1) = {lam2:+.6f}")
cross = r.find_conformal_crossing(dt)
print(f"  sign change at t = {cross:.6f}")
