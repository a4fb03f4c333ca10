"""Independent numerical oracles used to freeze expected test values.

Everything here deliberately avoids the closed forms installed in the
package: brute-force sampling, dynamic programming, constrained
numerical maximization and pivoted elimination, so the two routes can
disagree when one of them is wrong.
"""

from __future__ import annotations

import math

import numpy as np

from nccausal.hermitian import MonotoneFn
from nccausal.isocone import CapIsocone, LexIsocone, lex_membership, _rotation_to
from nccausal.minkowski import Event

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def power_iteration_extremes(mat: np.ndarray, iters: int = 500,
                             shift: float = 10.0) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a Hermitian matrix by power
    iteration on shifted copies (independent of any eigensolver)."""
    n = mat.shape[0]
    rng = np.random.default_rng(123)

    def dominant(m):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(iters):
            w = m @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                return 0.0
            v = w / norm
            lam = float((v.conj() @ (m @ v)).real)
        return lam

    eye = np.eye(n)
    hi = dominant(mat + shift * eye) - shift
    lo = -(dominant(-mat + shift * eye) - shift)
    return lo, hi


def lattice_path_proper_time(x: Event, y: Event, n: int = 10) -> float:
    """Max total proper time over monotone polygonal paths on an n x n
    light-cone lattice from x to y (dynamic programming)."""
    us = np.linspace(x.u, y.u, n)
    vs = np.linspace(x.v, y.v, n)
    best = np.full((n, n), -np.inf)
    best[0, 0] = 0.0
    for i in range(n):
        for j in range(n):
            if i == 0 and j == 0:
                continue
            for ip in range(i + 1):
                for jp in range(j + 1):
                    if ip == i and jp == j:
                        continue
                    du = us[i] - us[ip]
                    dv = vs[j] - vs[jp]
                    if du < 0 or dv < 0:
                        continue
                    cand = best[ip, jp] + math.sqrt(du * dv)
                    if cand > best[i, j]:
                        best[i, j] = cand
    return float(best[n - 1, n - 1])


def nnls_cone_reachable(v, axis, rho: float, n_dirs: int = 400,
                        rel_tol: float = 1e-6) -> bool:
    """Can v be written as a non-negative combination of cap directions?

    Samples the cap densely (rings including the boundary circle plus
    the in-plane extreme direction) and solves the non-negative least
    squares problem; reachability means a near-zero residual.
    """
    from scipy.optimize import nnls

    v = np.asarray(v, dtype=float)
    vn = float(np.linalg.norm(v))
    if vn == 0.0:
        return True
    rot = _rotation_to(np.asarray(axis, dtype=float) / np.linalg.norm(axis))
    dirs = []
    rings = max(4, int(math.sqrt(n_dirs / 4)))
    per = max(8, n_dirs // rings)
    for theta in np.linspace(0.0, rho, rings):
        for phi in np.linspace(0.0, 2.0 * math.pi, per, endpoint=False):
            local = np.array([math.sin(theta) * math.cos(phi),
                              math.sin(theta) * math.sin(phi),
                              math.cos(theta)])
            dirs.append(rot @ local)
    basis = np.array(dirs).T
    coeff, resid = nnls(basis, v / vn)
    return resid <= rel_tol


def geodesic_order_margin(cone: CapIsocone, n1: np.ndarray, n2: np.ndarray,
                          n_samples: int = 10_000, refine_iters: int = 60) -> float:
    """Margin of the geodesic-distance order test by direct cap sampling.

    The order requires every cap direction x to satisfy
    arccos(x . n1) >= arccos(x . n2), i.e. x . (n2 - n1) >= 0.  Samples
    the cap on rings including its boundary, then refines the worst
    direction inside the plane spanned by axis and n2 - n1 (where the
    minimizer lies, by reflection symmetry of the cap).  Returns the
    minimum of x . (n2 - n1); non-negative means ordered.
    """
    w = np.asarray(n2, dtype=float) - np.asarray(n1, dtype=float)
    if float(np.linalg.norm(w)) == 0.0:
        return 0.0
    axis, rho = cone.axis, cone.rho
    rot = _rotation_to(axis)
    rings = max(8, int(math.sqrt(n_samples / 2)))
    per = max(8, n_samples // rings)
    thetas = np.linspace(0.0, rho, rings)
    phis = np.linspace(0.0, 2.0 * math.pi, per, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    local = np.stack([np.sin(tt) * np.cos(pp),
                      np.sin(tt) * np.sin(pp),
                      np.cos(tt)], axis=-1).reshape(-1, 3)
    xs = local @ rot.T
    # Geodesic comparison: d(x, n1) >= d(x, n2) checked through arccos.
    ang1 = np.arccos(np.clip(xs @ np.asarray(n1, dtype=float), -1.0, 1.0))
    ang2 = np.arccos(np.clip(xs @ np.asarray(n2, dtype=float), -1.0, 1.0))
    margin = float(np.min(xs @ w))
    # The geodesic comparison and its dot form agree away from ties.
    assert np.all(((ang1 >= ang2) == (xs @ w >= 0.0)) | (np.abs(xs @ w) < 1e-9))
    # In-plane refinement of min x . w over polar angle theta in [0, rho].
    w_par = float(np.dot(w, axis))
    perp = w - w_par * axis
    pn = float(np.linalg.norm(perp))
    if pn > 1e-15:
        e = perp / pn

        def value(theta):
            return math.cos(theta) * w_par - math.sin(theta) * pn

        lo, hi = 0.0, rho
        a = hi - INVPHI * (hi - lo)
        b = lo + INVPHI * (hi - lo)
        fa, fb = value(a), value(b)
        for _ in range(refine_iters):
            if fa <= fb:
                hi, b, fb = b, a, fa
                a = hi - INVPHI * (hi - lo)
                fa = value(a)
            else:
                lo, a, fa = a, b, fb
                b = lo + INVPHI * (hi - lo)
                fb = value(b)
        margin = min(margin, value(lo), value(hi), value(0.0), value(rho))
    return margin


def sup_spectral_distance_batch(gap: float, d_xy: np.ndarray,
                                coarse: int = 512, iters: int = 80) -> np.ndarray:
    """Constrained sup defining the spectral distance, numerically.

    ``d_xy`` holds the equatorial-plane components of n1 - n2 (one row
    per state pair; at equal latitude the z and trace parts drop out of
    the objective).  The Hermitian element's off-diagonal entry runs
    over the disk of radius 1/gap; the objective |v . d| is maximized
    over a polar grid on the disk, then the angle is refined by golden
    section at the best radius.
    """
    d_xy = np.atleast_2d(np.asarray(d_xy, dtype=float))
    radii = np.linspace(0.0, 1.0 / gap, 9)[1:]
    thetas = np.linspace(0.0, 2.0 * math.pi, coarse, endpoint=False)
    proj = (np.cos(thetas)[None, :] * d_xy[:, 0:1]
            + np.sin(thetas)[None, :] * d_xy[:, 1:2])
    best_theta = thetas[np.argmax(np.abs(proj), axis=1)]
    best_r = radii[-1] * np.ones(d_xy.shape[0])
    coarse_best = np.max(np.abs(proj), axis=1) * radii[-1]
    for r in radii[:-1]:
        coarse_best = np.maximum(coarse_best, np.max(np.abs(proj), axis=1) * r)

    lo = best_theta - 2.0 * math.pi / coarse
    hi = best_theta + 2.0 * math.pi / coarse

    def value(theta):
        return np.abs(np.cos(theta) * d_xy[:, 0] + np.sin(theta) * d_xy[:, 1]) * best_r

    a = hi - INVPHI * (hi - lo)
    b = lo + INVPHI * (hi - lo)
    fa, fb = value(a), value(b)
    for _ in range(iters):
        take_left = fa >= fb
        hi = np.where(take_left, b, hi)
        lo = np.where(take_left, lo, a)
        a_new = hi - INVPHI * (hi - lo)
        b_new = lo + INVPHI * (hi - lo)
        fa_new = value(a_new)
        fb_new = value(b_new)
        a, b, fa, fb = a_new, b_new, fa_new, fb_new
    refined = np.maximum(np.maximum(value(lo), value(hi)), coarse_best)
    return refined


def pivoted_cholesky_psd(mat: np.ndarray, tol: float) -> bool:
    """Semidefiniteness by outer-product Cholesky with complete pivoting."""
    a = np.array(mat, dtype=complex)
    n = a.shape[0]
    for k in range(n):
        sub = a[k:, k:]
        diag = sub.diagonal().real
        i = int(np.argmax(diag))
        dmax = float(diag[i])
        if dmax < -tol:
            return False
        if dmax <= tol:
            return float(np.abs(sub).max()) <= 2.0 * max(dmax, tol)
        if i != 0:
            piv = k + i
            a[[k, piv], :] = a[[piv, k], :]
            a[:, [k, piv]] = a[:, [piv, k]]
        col = a[k + 1:, k].copy()
        a[k + 1:, k + 1:] -= np.outer(col, col.conj()) / a[k, k].real
    return True


def random_monotone_fn(rng: np.random.Generator, max_knots: int = 5,
                       span: float = 3.0) -> MonotoneFn:
    k = int(rng.integers(1, max_knots + 1))
    knots = np.sort(rng.uniform(-span, span, size=k))
    knots += np.arange(k) * 1e-3  # enforce strict increase
    values = np.cumsum(rng.uniform(0.0, 1.5, size=k)) + rng.normal()
    return MonotoneFn(knots, values)


def monotone_slope_at(f: MonotoneFn, t: float) -> float:
    """Exact slope of a piecewise-linear monotone function off its knots."""
    k, v = f.knots, f.values
    if k.size == 1:
        return 0.0
    if t < k[0]:
        return float((v[1] - v[0]) / (k[1] - k[0]))
    if t > k[-1]:
        return float((v[-1] - v[-2]) / (k[-1] - k[-2]))
    idx = int(np.searchsorted(k, t) - 1)
    idx = max(0, min(idx, k.size - 2))
    return float((v[idx + 1] - v[idx]) / (k[idx + 1] - k[idx]))


def existential_pushforward_member(pi, L: LexIsocone, target_blocks,
                                   scalar_grid=None) -> bool:
    """Does some member of L map onto the given target blocks?

    Pulls the target entries back through the morphism and searches
    exhaustively over scalar fills of the unselected blocks.
    """
    import itertools

    if scalar_grid is None:
        scalar_grid = [-20.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 20.0]
    pulled = {}
    for k, src in enumerate(pi.source_of):
        m = target_blocks[k].mat
        u = pi.unitaries[k]
        if u is not None:
            m = u.conj().T @ m @ u
        from nccausal.hermitian import HermMat
        pulled[src] = HermMat(m, tol=1e-9)
    free = [i for i in range(L.poset.size) if i not in pulled]
    from nccausal.hermitian import HermMat
    for combo in itertools.product(scalar_grid, repeat=len(free)):
        blocks = []
        for i, comp in enumerate(L.components):
            if i in pulled:
                blocks.append(pulled[i])
            else:
                c = combo[free.index(i)]
                blocks.append(HermMat(c * np.eye(comp.dim, dtype=complex)))
        if lex_membership(L, blocks):
            return True
    return False
