"""Dense complex Hermitian matrices at desk scale.

Carrier arithmetic for everything else in the package: spectra with
explicit rank-one eigenprojectors, a piecewise-linear non-decreasing
functional calculus, semidefiniteness tests and operator norms.
Dimensions are capped at 16.  The eigensolver is a closed form for
dimension 2 and cyclic complex Jacobi rotations above that; numpy's
own eigensolver is deliberately kept out of the solve path so tests
can use it as an independent cross-check.
"""

from __future__ import annotations

import math

import numpy as np

MAX_DIM = 16
HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-9

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (PAULI_X, PAULI_Y, PAULI_Z)

PAULI_X.setflags(write=False)
PAULI_Y.setflags(write=False)
PAULI_Z.setflags(write=False)


class EigenSolverError(RuntimeError):
    """Jacobi sweep limit exceeded without reaching the target accuracy."""


class HermMat:
    """Hermitian matrix of dimension 1..16.

    Construction rejects inputs whose anti-Hermitian part exceeds the
    tolerance and then symmetrizes exactly, so round-off accumulated by
    callers cannot leak into downstream spectra.  Instances are
    immutable; the backing array is marked read-only.
    """

    __slots__ = ("_mat",)

    def __init__(self, data, tol: float = HERMITICITY_TOL):
        mat = np.array(data, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        dim = mat.shape[0]
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"dimension {dim} outside the supported range 1..{MAX_DIM}")
        scale = max(1.0, float(np.abs(mat).max()))
        if float(np.abs(mat - mat.conj().T).max()) > tol * scale:
            raise ValueError("matrix is not Hermitian within tolerance")
        mat = (mat + mat.conj().T) / 2.0
        mat.setflags(write=False)
        self._mat = mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def mat(self) -> np.ndarray:
        """Read-only view of the underlying complex array."""
        return self._mat

    @classmethod
    def identity(cls, dim: int) -> "HermMat":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def diag(cls, entries) -> "HermMat":
        return cls(np.diag(np.asarray(entries, dtype=float)).astype(complex))

    @classmethod
    def from_pauli(cls, c: float, v) -> "HermMat":
        """Build ``c*I + v . sigma`` from real coefficients (dimension 2)."""
        v = np.asarray(v, dtype=float)
        m = c * np.eye(2, dtype=complex)
        for vi, sigma in zip(v, PAULI):
            m = m + vi * sigma
        return cls(m)

    def pauli_coeffs(self) -> tuple[float, np.ndarray]:
        """Decompose a 2x2 matrix as ``c*I + v . sigma``; returns (c, v)."""
        if self.dim != 2:
            raise ValueError("Pauli decomposition requires dimension 2")
        c = float(np.trace(self._mat).real) / 2.0
        v = np.array([float(np.trace(self._mat @ s).real) / 2.0 for s in PAULI])
        return c, v

    def trace(self) -> float:
        return float(np.trace(self._mat).real)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self._mat))

    def allclose(self, other: "HermMat", tol: float = 1e-10) -> bool:
        return bool(np.abs(self._mat - other._mat).max() <= tol)

    def __add__(self, other: "HermMat") -> "HermMat":
        return HermMat(self._mat + other._mat)

    def __sub__(self, other: "HermMat") -> "HermMat":
        return HermMat(self._mat - other._mat)

    def __mul__(self, scalar: float) -> "HermMat":
        return HermMat(self._mat * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "HermMat":
        return HermMat(-self._mat)

    def to_json(self) -> dict:
        """Serialize as ``{dim, re, im}`` with row-major real/imag parts."""
        return {
            "dim": self.dim,
            "re": [float(x) for x in self._mat.real.ravel()],
            "im": [float(x) for x in self._mat.imag.ravel()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HermMat":
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float).reshape(dim, dim)
        im = np.asarray(obj["im"], dtype=float).reshape(dim, dim)
        return cls(re + 1j * im)

    def __repr__(self) -> str:
        return f"HermMat(dim={self.dim})"


class Spectrum:
    """Eigenvalues (ascending, with multiplicity) and rank-one projectors."""

    __slots__ = ("eigenvalues", "projectors")

    def __init__(self, eigenvalues: np.ndarray, projectors: tuple[HermMat, ...]):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.projectors = tuple(projectors)

    def reconstruct(self) -> HermMat:
        dim = self.projectors[0].dim
        acc = np.zeros((dim, dim), dtype=complex)
        for lam, proj in zip(self.eigenvalues, self.projectors):
            acc += lam * proj.mat
        return HermMat(acc, tol=1e-9)


class MonotoneFn:
    """Piecewise-linear non-decreasing function on the reals.

    Defined by strictly increasing knots and non-decreasing values;
    extended affinely outside the outermost knots with the slope of the
    end segments (constant when there is a single knot).
    """

    __slots__ = ("knots", "values")

    def __init__(self, knots, values):
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size == 0:
            raise ValueError("knots and values must be equal-length 1-d arrays")
        if knots.size > 1 and not np.all(np.diff(knots) > 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.diff(values) < 0):
            raise ValueError("values must be non-decreasing")
        knots.setflags(write=False)
        values.setflags(write=False)
        self.knots = knots
        self.values = values

    @classmethod
    def identity(cls) -> "MonotoneFn":
        return cls([0.0, 1.0], [0.0, 1.0])

    @classmethod
    def constant(cls, c: float) -> "MonotoneFn":
        return cls([0.0], [float(c)])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        k, vals = self.knots, self.values
        if k.size == 1:
            out = np.full_like(t_arr, vals[0], dtype=float)
        else:
            out = np.interp(t_arr, k, vals)
            left = (vals[1] - vals[0]) / (k[1] - k[0])
            right = (vals[-1] - vals[-2]) / (k[-1] - k[-2])
            out = np.where(t_arr < k[0], vals[0] + left * (t_arr - k[0]), out)
            out = np.where(t_arr > k[-1], vals[-1] + right * (t_arr - k[-1]), out)
        if np.isscalar(t) or getattr(t, "ndim", 0) == 0:
            return float(out)
        return out


def _spectrum_dim2(mat: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    p = mat[0, 0].real
    q = mat[1, 1].real
    w = mat[0, 1]
    mean = 0.5 * (p + q)
    hd = 0.5 * (p - q)
    radius = math.hypot(hd, abs(w))
    lo, hi = mean - radius, mean + radius
    scale = max(1.0, abs(mean) + radius)
    if radius <= 1e-15 * scale:
        basis = np.eye(2, dtype=complex)
        return np.array([lo, hi]), [np.outer(basis[:, 0], basis[:, 0].conj()),
                                    np.outer(basis[:, 1], basis[:, 1].conj())]
    # Kernel vector of (mat - lo*I); branch on the larger of the two rows.
    if hd >= 0:
        v1 = np.array([w, -(hd + radius)], dtype=complex)
    else:
        v1 = np.array([radius - hd, -np.conj(w)], dtype=complex)
    v1 = v1 / np.linalg.norm(v1)
    v2 = np.array([-np.conj(v1[1]), np.conj(v1[0])], dtype=complex)
    return np.array([lo, hi]), [np.outer(v1, v1.conj()), np.outer(v2, v2.conj())]


def _jacobi(mat: np.ndarray, eps: float = 1e-13, max_sweeps: int = 40):
    """Cyclic complex Jacobi rotations; returns ascending eigenvalues and a unitary."""
    a = mat.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= eps * scale:
            w = np.diag(a).real.copy()
            order = np.argsort(w, kind="stable")
            return w[order], v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-2 * eps * scale / (n * n):
                    continue
                phase = apq / abs(apq)
                theta = 0.5 * math.atan2(2.0 * abs(apq), a[q, q].real - a[p, p].real)
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[p, q] = s
                rot[q, p] = -s * np.conj(phase)
                rot[q, q] = c * np.conj(phase)
                a = rot.conj().T @ a @ rot
                v = v @ rot
        a = (a + a.conj().T) / 2.0
    raise EigenSolverError(f"Jacobi did not converge in {max_sweeps} sweeps")


def spectrum(a: HermMat) -> Spectrum:
    """Spectral decomposition with real ascending eigenvalues.

    Returns one rank-one projector per eigenvalue entry (repeated
    eigenvalues get an arbitrary orthonormal basis of their eigenspace).
    """
    mat = a.mat
    if a.dim == 1:
        return Spectrum(np.array([mat[0, 0].real]), (HermMat.identity(1),))
    if a.dim == 2:
        w, projs = _spectrum_dim2(mat)
        return Spectrum(w, tuple(HermMat(p, tol=1e-10) for p in projs))
    w, vecs = _jacobi(mat)
    projs = tuple(
        HermMat(np.outer(vecs[:, i], vecs[:, i].conj()), tol=1e-9) for i in range(a.dim)
    )
    return Spectrum(w, projs)


def apply_monotone(a: HermMat, f: MonotoneFn) -> HermMat:
    """Functional calculus ``sum f(lam_i) P_i`` for a non-decreasing f."""
    spec = spectrum(a)
    vals = f(spec.eigenvalues)
    acc = np.zeros((a.dim, a.dim), dtype=complex)
    for fv, proj in zip(np.atleast_1d(vals), spec.projectors):
        acc += fv * proj.mat
    return HermMat(acc, tol=1e-9)


def is_psd(a: HermMat, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol``."""
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    return float(spectrum(a).eigenvalues[0]) >= -tol


def op_norm(a) -> float:
    """Largest singular value; for Hermitian input this is max |eigenvalue|."""
    mat = a.mat if isinstance(a, HermMat) else np.asarray(a, dtype=complex)
    gram = HermMat(mat.conj().T @ mat, tol=1e-9)
    top = float(spectrum(gram).eigenvalues[-1])
    return math.sqrt(max(0.0, top))


def commutator(a, b) -> np.ndarray:
    """``ab - ba``; for Hermitian inputs the result is checked anti-Hermitian."""
    am = a.mat if isinstance(a, HermMat) else np.asarray(a, dtype=complex)
    bm = b.mat if isinstance(b, HermMat) else np.asarray(b, dtype=complex)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    comm = am @ bm - bm @ am
    if isinstance(a, HermMat) and isinstance(b, HermMat):
        scale = max(1.0, float(np.abs(comm).max()))
        if float(np.abs(comm + comm.conj().T).max()) > 1e-10 * scale:
            raise ArithmeticError("commutator of Hermitian inputs is not anti-Hermitian")
    return comm


def random_herm(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermMat:
    """Random Hermitian matrix with independent Gaussian entries."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermMat(scale * (g + g.conj().T) / 2.0)
