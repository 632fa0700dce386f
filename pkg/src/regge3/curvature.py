"""Curvature functionals on piecewise flat 3-manifolds and their derivatives.

The basic objects, for a complex with metric (edge length vector) l:

* edge curvature  K_e = (2*pi - sum of incident dihedral angles) * l_e
* vertex curvature K_v = (1/2) sum_{e at v} K_e
* totals L = sum l_e, V = sum of tet volumes, EHR = sum K_e,
  and the scale-invariant normalizations LEHR = EHR / L and
  VEHR = EHR / V^(1/3).

Length-space gradients are analytic (EHR has gradient K_e / l_e); the
conformal gradients use the per-vertex quantities L_v and V_v.  Hessians
in length space are obtained by finite differences.  Within a conformal
class, an analytic Hessian of LEHR is available at constant scalar
curvature metrics.

Conformal coordinate convention
-------------------------------
The factor map scales the edge between v and v' by exp((f_v + f_v')/2).
First derivatives (``grad_conformal``) are taken with respect to the
factors f.  Second derivatives (``lehr_conformal_hessian_csc`` and
``conformal_hessian_fd``) are taken with respect to the per-vertex log
scale factors u = f / 2, under which the edge scales as exp(u_v + u_v');
each entry is therefore 4 times the corresponding f-derivative.  All
reference eigenvalues quoted in the tests use the u convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import Complex
from . import geometry
from .geometry import InadmissibleMetricError


@dataclass(frozen=True)
class CurvatureReport:
    """Every derived scalar of a (complex, metric) pair.

    Identities (tested): sum(k_vertex) = ehr, sum(l_vertex) = length,
    sum(v_vertex) = 3 * volume, sum(v_edge) = 3 * volume.
    """

    k_edge: np.ndarray      # (E,) edge curvatures K_e
    k_vertex: np.ndarray    # (V,) vertex curvatures K_v
    length: float           # total edge length L
    volume: float           # total volume V
    ehr: float              # sum of edge curvatures
    lehr: float             # ehr / length
    vehr: float             # ehr / volume**(1/3)
    l_vertex: np.ndarray    # (V,) L_v = (1/2) sum of incident lengths
    v_vertex: np.ndarray    # (V,) V_v = (1/3) sum over incident (tet, face) of h_f A_f
    v_edge: np.ndarray      # (E,) V_e = l_e dV/dl_e
    dual_length: np.ndarray  # (E,) signed dual areas l*_e

    def to_text(self) -> str:
        """Structured key-value serialization with 12 significant digits."""
        def fmt(x):
            return format(float(x), ".12g")

        lines = []
        for key in ("length", "volume", "ehr", "lehr", "vehr"):
            lines.append(f"{key}: {fmt(getattr(self, key))}")
        for key in ("k_edge", "k_vertex", "l_vertex", "v_vertex", "v_edge",
                    "dual_length"):
            arr = ", ".join(fmt(x) for x in getattr(self, key))
            lines.append(f"{key}: [{arr}]")
        return "\n".join(lines) + "\n"


def edge_curvatures(c: Complex, lengths) -> np.ndarray:
    """K_e = (2 pi - sum of dihedral angles at e) * l_e, shape (E,)."""
    lengths = np.asarray(lengths, dtype=float)
    betas = geometry.dihedral_angles(c.tet_lengths(lengths))
    angle_sum = np.zeros(c.num_edges)
    np.add.at(angle_sum, c.tet_edges.ravel(), betas.ravel())
    return (2.0 * np.pi - angle_sum) * lengths


def _vertex_half_sums(c: Complex, per_edge) -> np.ndarray:
    out = np.zeros(c.num_vertices)
    half = 0.5 * np.asarray(per_edge, dtype=float)
    np.add.at(out, c.edge_vertices[:, 0], half)
    np.add.at(out, c.edge_vertices[:, 1], half)
    return out


def ehr_value(c: Complex, lengths) -> float:
    return float(edge_curvatures(c, lengths).sum())


def lehr_value(c: Complex, lengths) -> float:
    return ehr_value(c, lengths) / float(np.sum(lengths))


def vehr_value(c: Complex, lengths) -> float:
    vol = float(geometry.tet_volume(c.tet_lengths(lengths)).sum())
    return ehr_value(c, lengths) / vol ** (1.0 / 3.0)


FUNCTIONALS = {"ehr": ehr_value, "lehr": lehr_value, "vehr": vehr_value}


def functionals(c: Complex, lengths) -> CurvatureReport:
    """Assemble the full :class:`CurvatureReport` for an admissible metric."""
    lengths = np.asarray(lengths, dtype=float)
    geometry.assert_admissible(c, lengths)
    tl = c.tet_lengths(lengths)
    geo = geometry.tet_geometry(tl)

    angle_sum = np.zeros(c.num_edges)
    np.add.at(angle_sum, c.tet_edges.ravel(), geo.dihedrals.ravel())
    k_edge = (2.0 * np.pi - angle_sum) * lengths
    k_vertex = _vertex_half_sums(c, k_edge)
    l_vertex = _vertex_half_sums(c, lengths)

    total_len = float(lengths.sum())
    volume = float(geo.volume.sum())
    ehr = float(k_edge.sum())

    # V_v = (1/3) sum over incident (tet, face) pairs of h_{f<t} A_f
    hA = geo.h_face * geo.areas                       # (T, 4)
    fverts = c.face_vertices[c.tet_faces]             # (T, 4, 3)
    v_vertex = np.zeros(c.num_vertices)
    np.add.at(v_vertex, fverts.ravel(),
              np.repeat(hA.ravel() / 3.0, 3))

    # V_e = l_e dV/dl_e from the analytic Cayley-Menger gradient
    dvol = geometry.cayley_menger_gradient(tl) / (576.0 * geo.volume[..., None])
    dV_dl = np.zeros(c.num_edges)
    np.add.at(dV_dl, c.tet_edges.ravel(), dvol.ravel())
    v_edge = lengths * dV_dl

    # dual areas, from the per-tet heights already computed
    contrib = np.zeros_like(tl)
    for m in range(6):
        (f1, k1), (f2, k2) = geometry.EDGE_FACES[m]
        contrib[..., m] = 0.5 * (geo.h_edge[..., f1, k1] * geo.h_face[..., f1]
                                 + geo.h_edge[..., f2, k2] * geo.h_face[..., f2])
    dual = np.zeros(c.num_edges)
    np.add.at(dual, c.tet_edges.ravel(), contrib.ravel())

    return CurvatureReport(
        k_edge=k_edge,
        k_vertex=k_vertex,
        length=total_len,
        volume=volume,
        ehr=ehr,
        lehr=ehr / total_len,
        vehr=ehr / volume ** (1.0 / 3.0),
        l_vertex=l_vertex,
        v_vertex=v_vertex,
        v_edge=v_edge,
        dual_length=dual,
    )


# ---------------------------------------------------------------------------
# gradients


def grad_lengths(c: Complex, lengths, which: str) -> np.ndarray:
    """Analytic length-space gradient of EHR, LEHR or VEHR, shape (E,).

    By the Schlaefli identity the angle terms drop out and
    d(EHR)/dl_e = K_e / l_e.
    """
    lengths = np.asarray(lengths, dtype=float)
    which = which.lower()
    k_edge = edge_curvatures(c, lengths)
    base = k_edge / lengths
    if which == "ehr":
        return base
    if which == "lehr":
        L = float(lengths.sum())
        return (base - k_edge.sum() / L) / L
    if which == "vehr":
        tl = c.tet_lengths(lengths)
        vols = geometry.tet_volume(tl)
        vol = float(vols.sum())
        dvol = geometry.cayley_menger_gradient(tl) / (576.0 * vols[..., None])
        dV_dl = np.zeros(c.num_edges)
        np.add.at(dV_dl, c.tet_edges.ravel(), dvol.ravel())
        ehr = float(k_edge.sum())
        return (base - ehr / (3.0 * vol) * dV_dl) / vol ** (1.0 / 3.0)
    raise ValueError(f"unknown functional {which!r}")


def grad_conformal(c: Complex, lengths, which: str) -> np.ndarray:
    """Gradient with respect to the conformal factors f, shape (V,).

    Evaluated at the metric induced by the factors; only the induced
    lengths enter the formulas: d(EHR)/df_v = K_v,
    d(LEHR)/df_v = (K_v - LEHR * L_v) / L, and
    d(VEHR)/df_v = (K_v - EHR/(3V) * V_v) / V^(1/3).
    """
    which = which.lower()
    rep = functionals(c, lengths)
    if which == "ehr":
        return rep.k_vertex.copy()
    if which == "lehr":
        return (rep.k_vertex - rep.lehr * rep.l_vertex) / rep.length
    if which == "vehr":
        lam = rep.ehr / (3.0 * rep.volume)
        return (rep.k_vertex - lam * rep.v_vertex) / rep.volume ** (1.0 / 3.0)
    raise ValueError(f"unknown functional {which!r}")


# ---------------------------------------------------------------------------
# finite-difference Hessians


def hessian_fd(fun, x, step=None, richardson: bool = False) -> np.ndarray:
    """Central-difference Hessian of a scalar function, symmetrized.

    Per-coordinate steps default to cbrt(machine eps) * max(|x_i|, 1).
    With ``richardson=True`` a two-scale extrapolation removes the
    leading O(h^2) truncation term (used by the golden-value tests, where
    the larger base step eps^(1/6) keeps roundoff small as well).

    If an evaluation fails (e.g. a neighbor point is inadmissible) the
    steps are halved once and the whole stencil is retried.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    eps = np.finfo(float).eps
    if step is None:
        base = eps ** (1.0 / 6.0) if richardson else eps ** (1.0 / 3.0)
        h = base * np.maximum(np.abs(x), 1.0)
    else:
        h = np.broadcast_to(np.asarray(step, dtype=float), (n,)).copy()

    def stencil(hvec):
        H = np.empty((n, n))
        f0 = fun(x)
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = hvec[i]
            H[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / hvec[i] ** 2
            for j in range(i + 1, n):
                ej = np.zeros(n)
                ej[j] = hvec[j]
                H[i, j] = H[j, i] = (fun(x + ei + ej) - fun(x + ei - ej)
                                     - fun(x - ei + ej) + fun(x - ei - ej)) \
                    / (4.0 * hvec[i] * hvec[j])
        return H

    def build(hvec):
        if not richardson:
            return stencil(hvec)
        return (4.0 * stencil(hvec) - stencil(2.0 * hvec)) / 3.0

    try:
        H = build(h)
    except Exception:
        H = build(0.5 * h)  # reduce step once, then let failures propagate
    return 0.5 * (H + H.T)


def gradient_fd(fun, x, step=None, richardson: bool = False) -> np.ndarray:
    """Central-difference gradient with steps cbrt(eps) * max(|x_i|, 1).

    ``richardson=True`` combines two step sizes to cancel the O(h^2)
    truncation term, for use as a high-accuracy oracle against analytic
    gradients; the base step stays at cbrt(eps) so that high derivatives
    near the admissibility boundary cannot dominate.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if step is None:
        h = np.finfo(float).eps ** (1.0 / 3.0) * np.maximum(np.abs(x), 1.0)
    else:
        h = np.broadcast_to(np.asarray(step, dtype=float), (n,)).copy()

    def central(hvec):
        g = np.empty(n)
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = hvec[i]
            g[i] = (fun(x + ei) - fun(x - ei)) / (2.0 * hvec[i])
        return g

    if not richardson:
        return central(h)
    return (4.0 * central(h) - central(2.0 * h)) / 3.0


def hessian_fd_lengths(c: Complex, lengths, which: str,
                       richardson: bool = True) -> np.ndarray:
    """Finite-difference length-space Hessian of a functional at a metric."""
    fun = FUNCTIONALS[which.lower()]
    return hessian_fd(lambda l: fun(c, l), np.asarray(lengths, dtype=float),
                      richardson=richardson)


def conformal_hessian_fd(c: Complex, lengths, which: str,
                         richardson: bool = True) -> np.ndarray:
    """Finite-difference conformal Hessian, in the u convention.

    Differentiates u -> F(exp(u_v + u_v') * l_e) at u = 0, i.e. with
    respect to per-vertex log scale factors (f = 2u in factor-map terms).
    The extrapolated variant uses a smaller base step than the length
    version: metrics near the admissibility boundary have large high
    derivatives in the conformal directions.
    """
    lengths = np.asarray(lengths, dtype=float)
    fun = FUNCTIONALS[which.lower()]
    ev = c.edge_vertices

    def obj(u):
        scaled = lengths * np.exp(u[ev[:, 0]] + u[ev[:, 1]])
        return fun(c, scaled)

    step = np.finfo(float).eps ** 0.2 if richardson else None
    return hessian_fd(obj, np.zeros(c.num_vertices), step=step,
                      richardson=richardson)


# ---------------------------------------------------------------------------
# conformal Hessian of LEHR at constant scalar curvature metrics


def laplacian_matrix(c: Complex, lengths) -> np.ndarray:
    """Discrete Laplacian: off-diagonal l*_e / l_e, zero row sums, (V, V).

    Parallel edges between the same vertex pair contribute additively,
    matching the quadratic form sum_e (l*_e/l_e)(x_v - x_v')^2.
    """
    lengths = np.asarray(lengths, dtype=float)
    w = geometry.dual_lengths(c, lengths) / lengths
    n = c.num_vertices
    D = np.zeros((n, n))
    a = c.edge_vertices[:, 0]
    b = c.edge_vertices[:, 1]
    np.add.at(D, (a, b), w)
    np.add.at(D, (b, a), w)
    np.add.at(D, (a, a), -w)
    np.add.at(D, (b, b), -w)
    return D


def normal_matrix(c: Complex, lengths) -> np.ndarray:
    """Curvature-deviation matrix entering the conformal LEHR Hessian.

    Off-diagonal (K_e - LEHR * l_e)/4 per edge between the pair, diagonal
    (K_v - LEHR * L_v)/2; the diagonal vanishes exactly at constant
    L-scalar curvature metrics.
    """
    lengths = np.asarray(lengths, dtype=float)
    k_edge = edge_curvatures(c, lengths)
    lam = k_edge.sum() / lengths.sum()
    k_vertex = _vertex_half_sums(c, k_edge)
    l_vertex = _vertex_half_sums(c, lengths)
    n = c.num_vertices
    N = np.zeros((n, n))
    dev = 0.25 * (k_edge - lam * lengths)
    a = c.edge_vertices[:, 0]
    b = c.edge_vertices[:, 1]
    np.add.at(N, (a, b), dev)
    np.add.at(N, (b, a), dev)
    N[np.arange(n), np.arange(n)] = 0.5 * (k_vertex - lam * l_vertex)
    return N


def lehr_conformal_hessian_csc(c: Complex, lengths, csc_tol: float = 1e-8) -> np.ndarray:
    """Analytic conformal Hessian of LEHR at a csc metric, u convention.

    Valid only at constant L-scalar curvature metrics (max residual
    checked against ``csc_tol``).  In factor coordinates f the Hessian is
    (-2 Delta + N) / L; the returned matrix carries the factor 4 from
    d f = 2 du so that it matches :func:`conformal_hessian_fd`.
    """
    lengths = np.asarray(lengths, dtype=float)
    res = float(np.abs(csc_residual(c, lengths, "L")).max())
    if res > csc_tol:
        raise ValueError(
            f"metric is not constant L-scalar curvature: max residual {res:.3e} "
            f"> {csc_tol:.1e}")
    L = float(lengths.sum())
    return 4.0 * (-2.0 * laplacian_matrix(c, lengths)
                  + normal_matrix(c, lengths)) / L


# ---------------------------------------------------------------------------
# residuals and bounds


def einstein_residual(c: Complex, lengths, which: str) -> np.ndarray:
    """Per-edge Einstein residual; the zero vector iff the metric is Einstein.

    which="L": K_e - LEHR * l_e.  which="V": K_e - EHR/(3V) * V_e.
    """
    lengths = np.asarray(lengths, dtype=float)
    which = which.upper()
    k_edge = edge_curvatures(c, lengths)
    if which == "L":
        return k_edge - (k_edge.sum() / lengths.sum()) * lengths
    if which == "V":
        rep = functionals(c, lengths)
        return rep.k_edge - rep.ehr / (3.0 * rep.volume) * rep.v_edge
    raise ValueError(f"unknown normalization {which!r}")


def csc_residual(c: Complex, lengths, which: str) -> np.ndarray:
    """Per-vertex constant-scalar-curvature residual.

    which="L": K_v - LEHR * L_v.  which="V": K_v - EHR/(3V) * V_v.
    """
    which = which.upper()
    if which == "L":
        lengths = np.asarray(lengths, dtype=float)
        k_edge = edge_curvatures(c, lengths)
        k_vertex = _vertex_half_sums(c, k_edge)
        l_vertex = _vertex_half_sums(c, lengths)
        return k_vertex - (k_edge.sum() / lengths.sum()) * l_vertex
    if which == "V":
        rep = functionals(c, lengths)
        return rep.k_vertex - rep.ehr / (3.0 * rep.volume) * rep.v_vertex
    raise ValueError(f"unknown normalization {which!r}")


@dataclass(frozen=True)
class BoundsReport:
    """Degree and fatness bounds together with the actual values."""

    max_edge_degree: int
    lehr: float
    lehr_lower: float      # 2 pi - pi * D_M
    lehr_upper: float      # 2 pi
    fatness: float         # V / L^3
    vehr: float
    vehr_lower: float      # min(0, 2 pi - pi D_M) * fatness^(-1/3)
    lehr_within_bounds: bool
    vehr_within_bounds: bool

    def to_text(self) -> str:
        def fmt(x):
            return format(float(x), ".12g")

        return "\n".join([
            f"max_edge_degree: {self.max_edge_degree}",
            f"lehr: {fmt(self.lehr)}",
            f"lehr_lower: {fmt(self.lehr_lower)}",
            f"lehr_upper: {fmt(self.lehr_upper)}",
            f"fatness: {fmt(self.fatness)}",
            f"vehr: {fmt(self.vehr)}",
            f"vehr_lower: {fmt(self.vehr_lower)}",
            f"lehr_within_bounds: {self.lehr_within_bounds}",
            f"vehr_within_bounds: {self.vehr_within_bounds}",
        ]) + "\n"


def bounds_report(c: Complex, lengths) -> BoundsReport:
    """Evaluate the edge-degree bounds on LEHR and the fatness bound on VEHR."""
    rep = functionals(c, lengths)
    deg = int(c.edge_degrees.max())
    lower = 2.0 * np.pi - np.pi * deg
    fat = rep.volume / rep.length ** 3
    vehr_lower = min(0.0, lower) * fat ** (-1.0 / 3.0)
    return BoundsReport(
        max_edge_degree=deg,
        lehr=rep.lehr,
        lehr_lower=lower,
        lehr_upper=2.0 * np.pi,
        fatness=fat,
        vehr=rep.vehr,
        vehr_lower=vehr_lower,
        lehr_within_bounds=bool(lower - 1e-12 <= rep.lehr <= 2.0 * np.pi + 1e-12),
        vehr_within_bounds=bool(rep.vehr >= vehr_lower - 1e-12),
    )
