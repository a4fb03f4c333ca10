"""Causal cone of the product geometry: Minkowski plane times M2(C).

A Hermitian-matrix-valued field on the plane belongs to the causal
cone when, at every point, the 4x4 block matrix

    [[ 2 du alpha,  [D_F, alpha] ],
     [ -[D_F, alpha],  2 dv alpha ]]

is positive semidefinite (du, dv are light-cone derivatives and D_F
the finite Dirac matrix).  The same module carries the spectral
distance on Bloch states induced by D_F and the resulting order on
product pure states: (x, s1) precedes (y, s2) iff x causally precedes
y and the Lorentz distance from x to y dominates the spectral distance
from s1 to s2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hermitian import HermMat, PSD_TOL, commutator, is_psd, spectrum
from .isocone import BlochState, bloch_rotation
from .minkowski import Event, causal_leq, lorentz_distance

GAMMA0 = np.array([[0.0, 1.0j], [1.0j, 0.0]])
GAMMA1 = np.array([[0.0, -1.0j], [1.0j, 0.0]])
J_OPERATOR = np.kron(1.0j * GAMMA0, np.eye(2, dtype=complex))
GAMMA0.setflags(write=False)
GAMMA1.setflags(write=False)
J_OPERATOR.setflags(write=False)

INFINITE = float("inf")

LATITUDE_TOL = 1e-9
ORDER_TOL = 1e-9


class AssemblyError(RuntimeError):
    """The assembled cone-condition matrix failed its Hermiticity check."""


@dataclass(frozen=True)
class FiniteDirac:
    """Diagonal finite Dirac matrix diag(d1, d2) on the inner space."""

    d1: float
    d2: float

    @property
    def gap(self) -> float:
        return abs(self.d1 - self.d2)

    @property
    def matrix(self) -> HermMat:
        return HermMat.diag([self.d1, self.d2])

    @classmethod
    def from_matrix(cls, h: HermMat) -> tuple["FiniteDirac", np.ndarray]:
        """Diagonalize a 2x2 Hermitian Dirac; returns the diagonal form
        and the unitary whose Bloch rotation realigns states to its
        eigenbasis (new_state = bloch_rotation(u.conj().T) @ old)."""
        if h.dim != 2:
            raise ValueError("finite Dirac must be 2x2")
        spec = spectrum(h)
        vecs = []
        for proj in spec.projectors:
            col = int(np.argmax(np.abs(np.diag(proj.mat))))
            vec = proj.mat[:, col]
            vecs.append(vec / np.linalg.norm(vec))
        u = np.column_stack(vecs)
        return cls(float(spec.eigenvalues[0]), float(spec.eigenvalues[1])), u


def rotate_state_to_dirac_basis(s: BlochState, u: np.ndarray) -> BlochState:
    """Express a Bloch state in the eigenbasis selected by from_matrix."""
    return BlochState(bloch_rotation(u.conj().T) @ s.n)


def j_bracket(alpha_t: np.ndarray, alpha_x: np.ndarray,
              dirac_comm: np.ndarray) -> np.ndarray:
    """The 4x4 operator j[D, alpha] assembled from the gamma constants.

    Takes the Cartesian derivatives of the field and its commutator
    with the finite Dirac matrix.  Used by tests to re-derive the block
    form of the cone condition from first principles.
    """
    g00 = GAMMA0 @ GAMMA0
    g01 = GAMMA0 @ GAMMA1
    return (np.kron(g00, alpha_t)
            + np.kron(g01, alpha_x)
            + np.kron(-1.0j * GAMMA1, dirac_comm))


def cone_block_matrix(alpha_u: np.ndarray, alpha_v: np.ndarray,
                      dirac_comm: np.ndarray) -> np.ndarray:
    """Block matrix whose positivity is the cone condition at a point."""
    top = np.hstack([2.0 * alpha_u, dirac_comm])
    bottom = np.hstack([-dirac_comm, 2.0 * alpha_v])
    return np.vstack([top, bottom])


def cone_condition_at(alpha_u: HermMat, alpha_v: HermMat, alpha: HermMat,
                      dirac: FiniteDirac, tol: float = PSD_TOL) -> bool:
    """Pointwise cone condition from light-cone derivatives.

    The off-diagonal block is the commutator with the finite Dirac,
    which is anti-Hermitian for Hermitian fields, so the assembly is
    Hermitian; a failure of that check signals corrupted inputs.
    """
    comm = commutator(dirac.matrix, alpha)
    block = cone_block_matrix(alpha_u.mat, alpha_v.mat, comm)
    try:
        herm = HermMat(block, tol=1e-10)
    except ValueError as exc:
        raise AssemblyError("cone-condition matrix is not Hermitian") from exc
    return is_psd(herm, tol)


def scalar_causal_iff(grad_u: float, grad_v: float) -> bool:
    """Causality criterion for scalar fields: both light-cone derivatives >= 0."""
    return grad_u >= 0.0 and grad_v >= 0.0


class MatrixField:
    """M2(C)-valued field sampled on a uniform (u, v) lattice.

    Derivatives are either supplied analytically or computed by
    second-order central differences (one-sided at the edges).
    """

    def __init__(self, u_min: float, u_max: float, v_min: float, v_max: float,
                 n: int, values: np.ndarray,
                 deriv_u: np.ndarray | None = None,
                 deriv_v: np.ndarray | None = None,
                 derivatives_kind: str = "finite-difference"):
        if n < 3:
            raise ValueError("grid needs at least 3 nodes per axis")
        if not (u_max > u_min and v_max > v_min):
            raise ValueError("degenerate grid rectangle")
        values = np.asarray(values, dtype=complex)
        if values.shape != (n, n, 2, 2):
            raise ValueError(f"values must have shape ({n}, {n}, 2, 2)")
        herm_defect = np.abs(values - values.conj().transpose(0, 1, 3, 2)).max()
        if herm_defect > 1e-10 * max(1.0, float(np.abs(values).max())):
            raise ValueError("field values are not Hermitian")
        self.u = np.linspace(u_min, u_max, n)
        self.v = np.linspace(v_min, v_max, n)
        self.n = n
        self.values = (values + values.conj().transpose(0, 1, 3, 2)) / 2.0
        if deriv_u is None or deriv_v is None:
            self.deriv_u = np.gradient(self.values, self.u, axis=0, edge_order=2)
            self.deriv_v = np.gradient(self.values, self.v, axis=1, edge_order=2)
            self.derivatives_kind = "finite-difference"
        else:
            self.deriv_u = np.asarray(deriv_u, dtype=complex)
            self.deriv_v = np.asarray(deriv_v, dtype=complex)
            self.derivatives_kind = derivatives_kind
        for arr in (self.values, self.deriv_u, self.deriv_v):
            arr.setflags(write=False)

    @property
    def hu(self) -> float:
        return float(self.u[1] - self.u[0])

    @property
    def hv(self) -> float:
        return float(self.v[1] - self.v[0])

    @classmethod
    def from_function(cls, fn, u_min: float, u_max: float, v_min: float,
                      v_max: float, n: int, du=None, dv=None,
                      family: str | None = None) -> "MatrixField":
        """Sample a callable (u, v) -> 2x2 array, with optional analytic
        derivative callables."""
        us = np.linspace(u_min, u_max, n)
        vs = np.linspace(v_min, v_max, n)
        values = np.empty((n, n, 2, 2), dtype=complex)
        for i, uu in enumerate(us):
            for j, vv in enumerate(vs):
                values[i, j] = np.asarray(fn(uu, vv), dtype=complex)
        if du is None or dv is None:
            return cls(u_min, u_max, v_min, v_max, n, values)
        d_u = np.empty_like(values)
        d_v = np.empty_like(values)
        for i, uu in enumerate(us):
            for j, vv in enumerate(vs):
                d_u[i, j] = np.asarray(du(uu, vv), dtype=complex)
                d_v[i, j] = np.asarray(dv(uu, vv), dtype=complex)
        kind = f"analytic:{family}" if family else "analytic:custom"
        return cls(u_min, u_max, v_min, v_max, n, values, d_u, d_v, kind)

    def value_at(self, i: int, j: int) -> HermMat:
        return HermMat(self.values[i, j])

    def deriv_u_at(self, i: int, j: int) -> HermMat:
        return HermMat(self.deriv_u[i, j], tol=1e-9)

    def deriv_v_at(self, i: int, j: int) -> HermMat:
        return HermMat(self.deriv_v[i, j], tol=1e-9)

    def event_at(self, i: int, j: int) -> Event:
        return Event.from_lightcone(float(self.u[i]), float(self.v[j]))

    def node_index(self, x: Event, tol: float = 1e-9) -> tuple[int, int]:
        i = int(round((x.u - self.u[0]) / self.hu))
        j = int(round((x.v - self.v[0]) / self.hv))
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError("event lies outside the grid")
        if abs(self.u[i] - x.u) > tol or abs(self.v[j] - x.v) > tol:
            raise ValueError("event is not a grid node")
        return i, j

    def to_json(self) -> dict:
        return {
            "grid": {"u_min": float(self.u[0]), "u_max": float(self.u[-1]),
                     "v_min": float(self.v[0]), "v_max": float(self.v[-1]),
                     "n": self.n},
            "values": [HermMat(self.values[i, j]).to_json()
                       for i in range(self.n) for j in range(self.n)],
            "derivatives": self.derivatives_kind,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixField":
        grid = obj["grid"]
        n = int(grid["n"])
        values = np.empty((n, n, 2, 2), dtype=complex)
        flat = obj["values"]
        if len(flat) != n * n:
            raise ValueError("values length does not match the grid")
        for i in range(n):
            for j in range(n):
                values[i, j] = HermMat.from_json(flat[i * n + j]).mat
        kind = obj.get("derivatives", "finite-difference")
        field = cls(float(grid["u_min"]), float(grid["u_max"]),
                    float(grid["v_min"]), float(grid["v_max"]), n, values)
        if kind.startswith("analytic:"):
            family = kind.split(":", 1)[1]
            scale = max(1.0, float(np.abs(values).max()))
            if family == "time-plus-constant":
                us = field.u[:, None, None, None]
                vs = field.v[None, :, None, None]
                t_part = ((us + vs) / 2.0) * np.eye(2, dtype=complex)
                residue = values - t_part
                if np.abs(residue - residue[0, 0]).max() > 1e-9 * scale:
                    raise ValueError("samples do not follow the "
                                     "time-plus-constant family")
                half = np.broadcast_to(0.5 * np.eye(2, dtype=complex),
                                       values.shape).copy()
                return cls(float(grid["u_min"]), float(grid["u_max"]),
                           float(grid["v_min"]), float(grid["v_max"]), n,
                           values, half, half.copy(), kind)
            if family == "affine":
                # Affine samples have vanishing second differences, and
                # central differences recover their derivatives exactly.
                d2u = np.diff(values, n=2, axis=0)
                d2v = np.diff(values, n=2, axis=1)
                if max(np.abs(d2u).max(), np.abs(d2v).max()) > 1e-9 * scale:
                    raise ValueError("samples do not follow the affine family")
                return cls(float(grid["u_min"]), float(grid["u_max"]),
                           float(grid["v_min"]), float(grid["v_max"]), n,
                           values, field.deriv_u.copy(), field.deriv_v.copy(), kind)
            raise ValueError(f"unknown analytic family {family!r}")
        return field


def discretization_tolerance(field: MatrixField, base_tol: float = PSD_TOL) -> float:
    """PSD tolerance for finite-difference fields: base + C*h^2.

    C is estimated by Richardson comparison of the gradient at spacing
    h against the gradient of the stride-2 subgrid at spacing 2h; the
    mismatch is 3*C*h^2 to leading order.  Analytic fields keep the
    base tolerance.
    """
    if field.derivatives_kind != "finite-difference":
        return base_tol
    n = field.n
    if n < 5:
        return base_tol * 100.0
    idx = np.arange(0, n, 2)
    sub_vals = field.values[np.ix_(idx, idx)]
    sub_u = field.u[idx]
    sub_v = field.v[idx]
    coarse_du = np.gradient(sub_vals, sub_u, axis=0, edge_order=2)
    coarse_dv = np.gradient(sub_vals, sub_v, axis=1, edge_order=2)
    fine_du = field.deriv_u[np.ix_(idx, idx)]
    fine_dv = field.deriv_v[np.ix_(idx, idx)]
    mismatch = max(float(np.abs(coarse_du - fine_du).max()),
                   float(np.abs(coarse_dv - fine_dv).max()))
    h = max(field.hu, field.hv)
    c_est = mismatch / (3.0 * h * h) if h > 0 else 0.0
    return base_tol + 2.0 * c_est * h * h


def field_in_cone(field: MatrixField, dirac: FiniteDirac,
                  tol: float | None = None) -> tuple[bool, tuple[int, int] | None]:
    """Cone membership over the whole grid, with the first failing node."""
    if tol is None:
        tol = discretization_tolerance(field)
    for i in range(field.n):
        for j in range(field.n):
            ok = cone_condition_at(field.deriv_u_at(i, j), field.deriv_v_at(i, j),
                                   field.value_at(i, j), dirac, tol)
            if not ok:
                return False, (i, j)
    return True, None


def spectral_distance(dirac: FiniteDirac, s1: BlochState, s2: BlochState,
                      latitude_tol: float = LATITUDE_TOL) -> float:
    """Distance between Bloch states induced by the finite Dirac.

    Finite only at equal latitude (z measured along the Dirac
    eigenbasis), where it equals the Euclidean chord divided by the
    eigenvalue gap; the sup defining it is unbounded otherwise.
    """
    if dirac.gap == 0.0:
        raise ValueError("degenerate finite Dirac: all commutators vanish")
    if abs(float(s1.n[2]) - float(s2.n[2])) > latitude_tol:
        return INFINITE
    return float(np.linalg.norm(s1.n - s2.n)) / dirac.gap


def product_state_order(dirac: FiniteDirac, x: Event, s1: BlochState,
                        y: Event, s2: BlochState, tol: float = ORDER_TOL) -> bool:
    """Order on product pure states (event, Bloch state).

    Related iff x causally precedes y and the Lorentz distance reaches
    the spectral distance between the states (infinite spectral
    distance can never be reached).
    """
    if not causal_leq(x, y):
        return False
    dist = spectral_distance(dirac, s1, s2)
    if math.isinf(dist):
        return False
    return lorentz_distance(x, y) >= dist - tol


def order_boundary_case(dirac: FiniteDirac, x: Event, s1: BlochState,
                        y: Event, s2: BlochState, tol: float = ORDER_TOL) -> bool:
    """Knife-edge flag: the Lorentz and spectral distances agree within tol."""
    dist = spectral_distance(dirac, s1, s2)
    if math.isinf(dist):
        return False
    return abs(lorentz_distance(x, y) - dist) < tol


@dataclass
class ClockProbeReport:
    """Eigenvalue behaviour of a cone member along the causal order."""

    eig_at_x: tuple[float, float]
    eig_at_y: tuple[float, float]
    paths_checked: int
    monotone_along_paths: bool
    inversion: dict | None

    @property
    def inversion_found(self) -> bool:
        return self.inversion is not None

    def to_json(self) -> dict:
        return {
            "eig_at_x": list(self.eig_at_x),
            "eig_at_y": list(self.eig_at_y),
            "paths_checked": self.paths_checked,
            "monotone_along_paths": self.monotone_along_paths,
            "inversion": self.inversion,
        }


def eigenvalue_clock_probe(field: MatrixField, x: Event, y: Event,
                           paths: int = 16, tol: float = 1e-9,
                           rng: np.random.Generator | None = None) -> ClockProbeReport:
    """Probe the per-eigenvalue clocks of a cone member.

    Callers must pass a field that satisfies the cone condition and
    grid nodes with x causally below y.  Each sorted eigenvalue is
    checked to be non-decreasing along sampled monotone grid paths, and
    the grid is searched for a causal node pair whose upper eigenvalue
    at the earlier node exceeds the lower eigenvalue at the later one
    (the behaviour separating causal cones from isocones).
    """
    rng = rng or np.random.default_rng(7)
    ix, jx = field.node_index(x)
    iy, jy = field.node_index(y)
    if not (ix <= iy and jx <= jy):
        raise ValueError("x must causally precede y on the grid")
    n = field.n
    eigs = np.empty((n, n, 2))
    for i in range(n):
        for j in range(n):
            eigs[i, j] = spectrum(field.value_at(i, j)).eigenvalues
    monotone = True
    for _ in range(paths):
        i = j = 0
        prev = eigs[0, 0]
        while i < n - 1 or j < n - 1:
            if i == n - 1:
                j += 1
            elif j == n - 1:
                i += 1
            elif rng.uniform() < 0.5:
                i += 1
            else:
                j += 1
            cur = eigs[i, j]
            if cur[0] < prev[0] - tol or cur[1] < prev[1] - tol:
                monotone = False
            prev = cur
    inversion = None
    for i in range(n):
        for j in range(n):
            # Any causal successor with a smaller bottom eigenvalue than
            # this node's top eigenvalue exhibits the inversion.
            top_here = eigs[i, j, 1]
            sub = eigs[i:, j:, 0]
            k = np.argwhere(sub < top_here - tol)
            if k.size:
                ki, kj = (int(k[0][0]) + i, int(k[0][1]) + j)
                inversion = {"node_a": [i, j], "node_b": [ki, kj],
                             "upper_at_a": float(top_here),
                             "lower_at_b": float(eigs[ki, kj, 0])}
                break
        if inversion is not None:
            break
    return ClockProbeReport(
        eig_at_x=(float(eigs[ix, jx, 0]), float(eigs[ix, jx, 1])),
        eig_at_y=(float(eigs[iy, jy, 0]), float(eigs[iy, jy, 1])),
        paths_checked=paths,
        monotone_along_paths=monotone,
        inversion=inversion,
    )
