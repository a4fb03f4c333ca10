"""Isocones of finite-dimensional matrix algebras and their state orders.

The building blocks are spherical-cap cones in the Hermitian part of
M2(C) (every rotationally symmetric isocone of M2 is of this shape),
the trivial "full" cone on blocks of any dimension, and lexicographic
sums of per-block cones over a finite poset.  The order induced on
pure states by a cap cone has a closed dual-cone form: writing K for
the cap and K deg for its polar dual (the cap of half-angle pi/2 - rho
around the same axis), state n1 precedes n2 iff n2 - n1 lies in K deg.
Tests validate that form against direct geodesic-distance sampling of
the cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hermitian import HermMat, PAULI, random_herm, spectrum
from .poset import FinitePoset

ANGLE_TOL = 1e-10
ZERO_VEC_TOL = 1e-10
SPECTRAL_TOL = 1e-10
STATE_TOL = 1e-9


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("zero vector cannot be normalized")
    return v / norm


def _angle(a: np.ndarray, b: np.ndarray) -> float:
    cosv = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    return float(np.arccos(np.clip(cosv, -1.0, 1.0)))


class BlochState:
    """Pure state of M2(C) as a unit vector on the Bloch sphere."""

    __slots__ = ("n",)

    def __init__(self, n):
        n = np.asarray(n, dtype=float)
        if n.shape != (3,):
            raise ValueError("Bloch vector must have three components")
        norm = float(np.linalg.norm(n))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector norm {norm} is not 1 within 1e-12")
        n = n / norm
        n.setflags(write=False)
        self.n = n

    def projection(self) -> HermMat:
        """Rank-one projection (I + n.sigma)/2."""
        m = np.eye(2, dtype=complex)
        for ni, sigma in zip(self.n, PAULI):
            m = m + ni * sigma
        return HermMat(m / 2.0)

    @classmethod
    def from_ket(cls, xi) -> "BlochState":
        xi = np.asarray(xi, dtype=complex)
        xi = xi / np.linalg.norm(xi)
        n = [float((xi.conj() @ (s @ xi)).real) for s in PAULI]
        return cls(n)

    def same_state(self, other: "BlochState", tol: float = STATE_TOL) -> bool:
        return bool(np.linalg.norm(self.n - other.n) <= tol)

    def __repr__(self) -> str:
        return f"BlochState({self.n.tolist()})"


class CapIsocone:
    """Isocone of M2(C) cut out by a spherical cap, or the trivial FULL cone.

    A cap with axis ``a`` and angular radius ``rho`` in (0, pi/2]
    represents the set of ``c*I + v.sigma`` with v zero or within angle
    rho of the axis: a closed convex cone containing the constants with
    non-empty interior.  ``CapIsocone.full()`` is the whole Hermitian
    part (usable as the trivial isocone in any dimension).
    """

    __slots__ = ("axis", "rho")

    def __init__(self, axis, rho: float):
        self.axis = _unit(axis)
        self.axis.setflags(write=False)
        rho = float(rho)
        if not 0.0 < rho <= np.pi / 2.0:
            raise ValueError("cap radius must lie in (0, pi/2]")
        self.rho = rho

    @classmethod
    def full(cls) -> "CapIsocone":
        """The trivial isocone: the whole Hermitian part, in any dimension."""
        cone = object.__new__(cls)
        cone.axis = None  # type: ignore[assignment]
        cone.rho = None  # type: ignore[assignment]
        return cone

    @property
    def is_full(self) -> bool:
        return self.axis is None

    @property
    def dual_half_angle(self) -> float:
        """Half-angle of the polar dual cone (pi/2 - rho)."""
        if self.is_full:
            raise ValueError("the full cone has no dual cap")
        return np.pi / 2.0 - self.rho

    def to_json(self):
        if self.is_full:
            return "full"
        return {"axis": self.axis.tolist(), "rho": self.rho}

    @classmethod
    def from_json(cls, obj) -> "CapIsocone":
        if obj == "full":
            return cls.full()
        return cls(obj["axis"], obj["rho"])

    def __repr__(self) -> str:
        if self.is_full:
            return "CapIsocone(full)"
        return f"CapIsocone(axis={self.axis.tolist()}, rho={self.rho})"


def cap_membership(cone: CapIsocone, a: HermMat, tol: float = ANGLE_TOL) -> bool:
    """Is ``a`` in the cap cone?

    Decomposes a = c*I + v.sigma; membership holds when the cone is
    full, v vanishes, or v lies within the cap angle of the axis.
    """
    if a.dim != 2:
        raise ValueError("cap cones live in M2(C)")
    if cone.is_full:
        return True
    _, v = a.pauli_coeffs()
    vnorm = float(np.linalg.norm(v))
    if vnorm <= ZERO_VEC_TOL:
        return True
    return _angle(v, cone.axis) <= cone.rho + tol


def cap_induced_order(cone: CapIsocone, s1: BlochState, s2: BlochState,
                      tol: float = ANGLE_TOL) -> bool:
    """Order induced on Bloch states by a cap cone, via the dual cone.

    s1 precedes s2 iff every cap direction x has geodesic distance to
    s1 at least its distance to s2; equivalently n2 - n1 lies in the
    dual cap of half-angle pi/2 - rho.  The full cone induces equality.
    """
    if cone.is_full:
        return s1.same_state(s2)
    w = s2.n - s1.n
    wnorm = float(np.linalg.norm(w))
    if wnorm <= ZERO_VEC_TOL:
        return True
    return _angle(w, cone.axis) <= cone.dual_half_angle + tol


def dual_cap_contains(cone: CapIsocone, w, tol: float = ANGLE_TOL) -> bool:
    """Membership of a displacement vector in the dual cap K deg."""
    if cone.is_full:
        raise ValueError("the full cone has no dual cap")
    w = np.asarray(w, dtype=float)
    if float(np.linalg.norm(w)) <= ZERO_VEC_TOL:
        return True
    return _angle(w, cone.axis) <= cone.dual_half_angle + tol


def min_cap_dot(cone: CapIsocone, w, grid: int = 2048) -> tuple[np.ndarray, float]:
    """Cap direction minimizing ``x . w`` and the minimum value.

    The minimizer lies in the plane spanned by the axis and w (the cap
    and the objective are symmetric under reflection across it), so a
    dense scan of the polar angle suffices.
    """
    if cone.is_full:
        raise ValueError("the full cone has every direction")
    w = np.asarray(w, dtype=float)
    axis = cone.axis
    w_par = float(np.dot(w, axis))
    perp = w - w_par * axis
    pnorm = float(np.linalg.norm(perp))
    if pnorm <= 1e-15 * max(1.0, float(np.linalg.norm(w))):
        # w parallel to the axis: every boundary direction ties.
        e = _unit(np.cross(axis, [1.0, 0.0, 0.0])
                  if abs(axis[0]) < 0.9 else np.cross(axis, [0.0, 1.0, 0.0]))
    else:
        e = perp / pnorm
    thetas = np.linspace(0.0, cone.rho, grid)
    dots = np.cos(thetas) * w_par - np.sin(thetas) * pnorm
    k = int(np.argmin(dots))
    x = np.cos(thetas[k]) * axis - np.sin(thetas[k]) * e
    return x, float(dots[k])


@dataclass(frozen=True)
class LexComponent:
    """One summand of a lexicographic isocone: block dimension plus cone."""

    dim: int
    cone: CapIsocone

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("block dimension must be positive")
        if not self.cone.is_full and self.dim != 2:
            raise ValueError("non-trivial cap cones require dimension 2")


class LexIsocone:
    """Lexicographic sum of per-block isocones over a finite poset.

    Membership: every block element lies in its component cone, and for
    each strict poset pair x < y the top of the spectrum at x does not
    exceed the bottom of the spectrum at y.
    """

    __slots__ = ("poset", "components")

    def __init__(self, poset: FinitePoset, components):
        components = tuple(components)
        if len(components) != poset.size:
            raise ValueError("one component per poset point required")
        self.poset = poset
        self.components = components

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(c.dim for c in self.components)

    def random_member(self, rng: np.random.Generator, spread: float = 3.0) -> list[HermMat]:
        """Random member: per-block cone elements offset by chain levels."""
        levels = self.poset.levels()
        blocks = []
        for comp, lev in zip(self.components, levels):
            base = spread * float(lev) + float(rng.uniform(-0.4, 0.4))
            if comp.cone.is_full:
                small = random_herm(rng, comp.dim, scale=0.3)
            else:
                small = random_cap_element(comp.cone, rng, scale=0.3)
            # Keep each block's spectrum inside a unit band around its level offset.
            shift = small.mat + base * np.eye(comp.dim)
            blocks.append(HermMat(shift))
        return blocks

    def to_json(self) -> dict:
        return {
            "poset": self.poset.to_json(),
            "components": [{"dim": c.dim, "cone": c.cone.to_json()} for c in self.components],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LexIsocone":
        poset = FinitePoset.from_json(obj["poset"])
        comps = [LexComponent(int(c["dim"]), CapIsocone.from_json(c["cone"]))
                 for c in obj["components"]]
        return cls(poset, comps)


def lex_membership(L: LexIsocone, blocks, tol: float = SPECTRAL_TOL) -> bool:
    """Membership in the lexicographic sum."""
    blocks = list(blocks)
    dims = tuple(b.dim for b in blocks)
    if dims != L.block_dims:
        raise ValueError(f"block dimensions {dims} do not match {L.block_dims}")
    for comp, b in zip(L.components, blocks):
        if comp.dim == 2 and not cap_membership(comp.cone, b):
            return False
        # Full components accept every Hermitian element.
    spectra = [spectrum(b).eigenvalues for b in blocks]
    for x, y in L.poset.strict_pairs():
        if float(spectra[x][-1]) > float(spectra[y][0]) + tol:
            return False
    return True


def states_equal(dim: int, s1, s2, tol: float = STATE_TOL) -> bool:
    """Equality of pure states of a dim-n block, up to phase."""
    if dim == 2:
        return s1.same_state(s2, tol)
    if dim == 1:
        return True
    v1 = np.asarray(s1, dtype=complex)
    v2 = np.asarray(s2, dtype=complex)
    overlap = abs(complex(v1.conj() @ v2)) / (np.linalg.norm(v1) * np.linalg.norm(v2))
    return bool(1.0 - overlap <= tol)


def state_value(a: HermMat, state) -> float:
    """Value of a pure state on a Hermitian element (Gelfand transform)."""
    if a.dim == 2 and isinstance(state, BlochState):
        c, v = a.pauli_coeffs()
        return c + float(np.dot(v, state.n))
    if a.dim == 1:
        return float(a.mat[0, 0].real)
    ket = np.asarray(state, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    return float((ket.conj() @ (a.mat @ ket)).real)


def lex_induced_order(L: LexIsocone, x: int, s1, y: int, s2) -> bool:
    """Order induced on pure states of the direct sum.

    (x, s1) precedes (y, s2) iff x and y differ and x <= y in the
    poset, or x == y and s1 precedes s2 in the block's own order (the
    full cone inducing equality).
    """
    if x != y:
        return L.poset.leq(x, y)
    comp = L.components[x]
    if comp.cone.is_full or comp.dim != 2:
        return states_equal(comp.dim, s1, s2)
    return cap_induced_order(comp.cone, s1, s2)


def random_bloch(rng: np.random.Generator) -> BlochState:
    v = rng.standard_normal(3)
    while float(np.linalg.norm(v)) < 1e-8:
        v = rng.standard_normal(3)
    return BlochState(v / np.linalg.norm(v))


def random_block_state(rng: np.random.Generator, dim: int):
    """Random pure state of a dim-n block, in the block's representation."""
    if dim == 2:
        return random_bloch(rng)
    ket = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return ket / np.linalg.norm(ket)


def random_cap_element(cone: CapIsocone, rng: np.random.Generator,
                       scale: float = 1.0) -> HermMat:
    """Random element of a cap cone (random cap direction, random trace part)."""
    if cone.is_full:
        return random_herm(rng, 2, scale=scale)
    theta = cone.rho * float(np.sqrt(rng.uniform(0.0, 1.0)))
    phi = float(rng.uniform(0.0, 2.0 * np.pi))
    local = np.array([np.sin(theta) * np.cos(phi),
                      np.sin(theta) * np.sin(phi),
                      np.cos(theta)])
    v = _rotation_to(cone.axis) @ local
    c = float(rng.normal(0.0, 1.0))
    t = float(rng.uniform(0.0, 1.0))
    return HermMat.from_pauli(scale * c, scale * t * v)


def _rotation_to(axis: np.ndarray) -> np.ndarray:
    """Rotation matrix taking +z to the given unit axis."""
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.dot(z, axis))
    if c > 1.0 - 1e-14:
        return np.eye(3)
    if c < -1.0 + 1e-14:
        return np.diag([1.0, -1.0, -1.0])
    k = np.cross(z, axis)
    s = float(np.linalg.norm(k))
    k = k / s
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + s * kx + (1.0 - c) * (kx @ kx)


def _scalar_step_member(L: LexIsocone, x: int, lo: float = 0.0,
                        hi: float = 1.0) -> list[HermMat]:
    """Scalar member taking value hi on the up-set of x and lo elsewhere."""
    blocks = []
    for z, comp in enumerate(L.components):
        c = hi if L.poset.leq(x, z) else lo
        blocks.append(HermMat(c * np.eye(comp.dim, dtype=complex)))
    return blocks


def _same_block_witness(L: LexIsocone, x: int, s1, s2,
                        eps: float = 0.25) -> list[HermMat] | None:
    """Member separating two states of block x when the block order fails.

    The block-x entry is a small cone element whose Gelfand transform
    decreases from s1 to s2; the other blocks carry scalar offsets
    respecting the poset.  Returns None when no separating direction is
    found (borderline pairs).
    """
    comp = L.components[x]
    if comp.cone.is_full or comp.dim != 2:
        # Equality order: separate distinct states by the projection gap.
        if comp.dim == 2:
            p1, p2 = s1.projection().mat, s2.projection().mat
        else:
            k1 = np.asarray(s1, dtype=complex)
            k2 = np.asarray(s2, dtype=complex)
            k1, k2 = k1 / np.linalg.norm(k1), k2 / np.linalg.norm(k2)
            p1 = np.outer(k1, k1.conj())
            p2 = np.outer(k2, k2.conj())
        center = HermMat(eps * (p1 - p2))
    else:
        w = s2.n - s1.n
        direction, value = min_cap_dot(comp.cone, w)
        if value >= 0.0:
            return None
        center = HermMat.from_pauli(0.0, eps * direction)
    blocks = []
    for z, comp_z in enumerate(L.components):
        if z == x:
            blocks.append(center)
        else:
            c = 2.0 * eps if L.poset.strict(x, z) else -2.0 * eps
            blocks.append(HermMat(c * np.eye(comp_z.dim, dtype=complex)))
    return blocks


@dataclass
class ConsistencyReport:
    """Outcome of checking the lexicographic order against its cone."""

    pairs_checked: int
    members_checked: int
    monotonicity_violations: list = field(default_factory=list)
    witness_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.monotonicity_violations and not self.witness_failures

    def to_json(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "members_checked": self.members_checked,
            "monotonicity_violations": self.monotonicity_violations,
            "witness_failures": self.witness_failures,
            "passed": self.passed,
        }


def lex_order_consistency_check(L: LexIsocone, samples: int,
                                rng: np.random.Generator | None = None,
                                tol: float = STATE_TOL) -> ConsistencyReport:
    """Check the induced-order formula against element-wise comparison.

    For random state pairs: whenever the lexicographic order relates
    them, no sampled member may decrease between them; whenever it does
    not, a separating member is constructed (scalar steps across
    blocks, cone directions within a block) and verified.
    """
    rng = rng or np.random.default_rng(0)
    members = [L.random_member(rng) for _ in range(max(8, samples // 8))]
    report = ConsistencyReport(pairs_checked=samples, members_checked=len(members))
    n = L.poset.size
    for _ in range(samples):
        x = int(rng.integers(n))
        y = x if rng.uniform() < 0.5 else int(rng.integers(n))
        s1 = random_block_state(rng, L.components[x].dim)
        s2 = random_block_state(rng, L.components[y].dim)
        related = lex_induced_order(L, x, s1, y, s2)
        if related:
            for blocks in members:
                v1 = state_value(blocks[x], s1)
                v2 = state_value(blocks[y], s2)
                if v1 > v2 + tol:
                    report.monotonicity_violations.append(
                        {"x": x, "y": y, "value_gap": v1 - v2,
                         "blocks": [b.to_json() for b in blocks]})
        else:
            if x != y:
                witness = _scalar_step_member(L, x)
            else:
                witness = _same_block_witness(L, x, s1, s2)
                if witness is None:
                    continue  # pair sits on the dual-cone boundary band
            if not lex_membership(L, witness):
                report.witness_failures.append(
                    {"x": x, "y": y, "reason": "witness not a member",
                     "blocks": [b.to_json() for b in witness]})
                continue
            v1 = state_value(witness[x], s1)
            v2 = state_value(witness[y], s2)
            if not v1 > v2:
                report.witness_failures.append(
                    {"x": x, "y": y, "reason": "witness does not separate",
                     "value_gap": v1 - v2})
    return report


class BlockMorphism:
    """Surjective *-morphism between direct sums of matrix blocks.

    Each target block copies exactly one source block, optionally
    conjugated by a block unitary; distinct target blocks must copy
    distinct source blocks, which makes the map onto.
    """

    __slots__ = ("source_dims", "target_dims", "source_of", "unitaries")

    def __init__(self, source_dims, target_dims, source_of, unitaries=None):
        self.source_dims = tuple(int(d) for d in source_dims)
        self.target_dims = tuple(int(d) for d in target_dims)
        self.source_of = tuple(int(s) for s in source_of)
        if len(self.source_of) != len(self.target_dims):
            raise ValueError("one source index per target block required")
        if len(set(self.source_of)) != len(self.source_of):
            raise ValueError("morphism is not surjective: repeated source block")
        for k, src in enumerate(self.source_of):
            if not 0 <= src < len(self.source_dims):
                raise ValueError(f"source index {src} out of range")
            if self.source_dims[src] != self.target_dims[k]:
                raise ValueError("block dimensions do not match along the morphism")
        if unitaries is None:
            unitaries = (None,) * len(self.target_dims)
        checked = []
        for k, u in enumerate(unitaries):
            if u is None:
                checked.append(None)
                continue
            u = np.asarray(u, dtype=complex)
            d = self.target_dims[k]
            if u.shape != (d, d) or np.abs(u @ u.conj().T - np.eye(d)).max() > 1e-10:
                raise ValueError(f"block {k}: conjugator is not unitary")
            checked.append(u)
        self.unitaries = tuple(checked)

    @classmethod
    def identity(cls, dims) -> "BlockMorphism":
        dims = tuple(dims)
        return cls(dims, dims, range(len(dims)))

    def apply(self, blocks) -> list[HermMat]:
        blocks = list(blocks)
        out = []
        for k, src in enumerate(self.source_of):
            m = blocks[src].mat
            u = self.unitaries[k]
            if u is not None:
                m = u @ m @ u.conj().T
            out.append(HermMat(m, tol=1e-10))
        return out


def bloch_rotation(u) -> np.ndarray:
    """SO(3) rotation of Bloch vectors induced by a 2x2 unitary conjugation."""
    u = np.asarray(u, dtype=complex)
    rot = np.empty((3, 3))
    for j, sj in enumerate(PAULI):
        conj = u @ sj @ u.conj().T
        for i, si in enumerate(PAULI):
            rot[i, j] = float(np.trace(si @ conj).real) / 2.0
    return rot


def pushforward(pi: BlockMorphism, L: LexIsocone) -> LexIsocone:
    """Image of a lexicographic isocone under a block morphism.

    The image is again a lexicographic sum: the sub-poset induced on
    the selected source blocks, with each cap cone's axis rotated by
    the Bloch rotation of the block conjugator.  Unselected blocks
    impose no constraint because their entries can always be filled
    with scalar levels interpolating the selected spectra.
    """
    if L.block_dims != pi.source_dims:
        raise ValueError("morphism source does not match the isocone's blocks")
    selected = list(pi.source_of)
    sub_rel = L.poset.relation[np.ix_(selected, selected)]
    sub_poset = FinitePoset(sub_rel)
    comps = []
    for k, src in enumerate(selected):
        comp = L.components[src]
        cone = comp.cone
        u = pi.unitaries[k]
        if not cone.is_full and u is not None:
            cone = CapIsocone(bloch_rotation(u) @ cone.axis, cone.rho)
        comps.append(LexComponent(comp.dim, cone))
    return LexIsocone(sub_poset, comps)


@dataclass
class SaturationReport:
    """Sampling evidence for saturation of a lexicographic isocone.

    Survivors are sampled elements that look isotone on every sampled
    state pair yet fail membership, after densified re-testing.  An
    empty survivor list means "no counterexample found", never a proof
    of saturation.
    """

    elements_checked: int
    members_included: int
    flagged_coarse: int
    eliminated_by_densification: int
    survivors: list = field(default_factory=list)
    members_flagged: int = 0

    @property
    def summary(self) -> str:
        if self.survivors:
            return f"{len(self.survivors)} saturation counterexample candidate(s)"
        return "no counterexample found"

    def to_json(self) -> dict:
        return {
            "elements_checked": self.elements_checked,
            "members_included": self.members_included,
            "flagged_coarse": self.flagged_coarse,
            "eliminated_by_densification": self.eliminated_by_densification,
            "members_flagged": self.members_flagged,
            "survivors": self.survivors,
            "summary": self.summary,
        }


def _ordered_state_pairs(L: LexIsocone, count: int, rng: np.random.Generator):
    """Sample state pairs related by the lexicographic order.

    Mixes strict cross-block pairs with same-block pairs built from a
    dual-cap displacement (two unit vectors whose difference lies in
    K deg, so they are related by construction).
    """
    strict = L.poset.strict_pairs()
    cap_blocks = [i for i, c in enumerate(L.components)
                  if c.dim == 2 and not c.cone.is_full]
    pairs = []
    for _ in range(count):
        use_cross = strict and (not cap_blocks or rng.uniform() < 0.5)
        if use_cross:
            x, y = strict[int(rng.integers(len(strict)))]
            pairs.append(((x, random_block_state(rng, L.components[x].dim)),
                          (y, random_block_state(rng, L.components[y].dim))))
        elif cap_blocks:
            x = cap_blocks[int(rng.integers(len(cap_blocks)))]
            cone = L.components[x].cone
            pair = _dual_displacement_pair(cone, rng)
            if pair is not None:
                pairs.append(((x, pair[0]), (x, pair[1])))
    return pairs


def _dual_displacement_pair(cone: CapIsocone, rng: np.random.Generator,
                            direction: np.ndarray | None = None):
    """Two Bloch states with n2 - n1 in K deg (hence order-related)."""
    if direction is None:
        half = cone.dual_half_angle
        theta = half * float(np.sqrt(rng.uniform(0.0, 1.0)))
        phi = float(rng.uniform(0.0, 2.0 * np.pi))
        local = np.array([np.sin(theta) * np.cos(phi),
                          np.sin(theta) * np.sin(phi),
                          np.cos(theta)])
        w = _rotation_to(cone.axis) @ local
    else:
        w = _unit(direction)
    for _ in range(64):
        n1 = random_bloch(rng).n
        proj = float(np.dot(n1, w))
        if proj < -1e-3:
            step = -2.0 * proj  # chord length keeping n1 + step*w on the sphere
            n2 = n1 + step * w
            return BlochState(n1), BlochState(n2 / np.linalg.norm(n2))
    return None


def _isotone_on_pairs(L: LexIsocone, blocks, pairs, tol: float) -> bool:
    for (x, s1), (y, s2) in pairs:
        if state_value(blocks[x], s1) > state_value(blocks[y], s2) + tol:
            return False
    return True


def _targeted_pairs(L: LexIsocone, blocks, rng: np.random.Generator):
    """Stress pairs aimed at the given element's likely violations."""
    pairs = []
    for x, y in L.poset.strict_pairs():
        top = spectrum(blocks[x])
        bot = spectrum(blocks[y])
        s_top = _state_from_projector(L.components[x].dim, top.projectors[-1])
        s_bot = _state_from_projector(L.components[y].dim, bot.projectors[0])
        pairs.append(((x, s_top), (y, s_bot)))
    for x, comp in enumerate(L.components):
        if comp.dim != 2 or comp.cone.is_full:
            continue
        _, v = blocks[x].pauli_coeffs()
        if float(np.linalg.norm(v)) <= ZERO_VEC_TOL:
            continue
        dual = CapIsocone(comp.cone.axis, max(comp.cone.dual_half_angle, 1e-12))
        w_star, value = min_cap_dot(dual, v)
        if value < 0.0:
            pair = _dual_displacement_pair(comp.cone, rng, direction=w_star)
            if pair is not None:
                pairs.append(((x, pair[0]), (x, pair[1])))
    return pairs


def _state_from_projector(dim: int, proj: HermMat):
    if dim == 2:
        _, v = proj.pauli_coeffs()
        return BlochState(_unit(v))
    # Dominant column of a rank-one projector is the eigenvector.
    col = int(np.argmax(np.abs(np.diag(proj.mat))))
    ket = proj.mat[:, col]
    return ket / np.linalg.norm(ket)


def saturation_check(L: LexIsocone, state_samples: int, element_samples: int,
                     rng: np.random.Generator | None = None,
                     tol: float = STATE_TOL) -> SaturationReport:
    """Search for elements isotone on sampled pairs but outside the cone.

    Sampled elements mix known members with free Hermitian draws.
    Elements flagged on the coarse pair sample are re-tested at ten
    times the density plus targeted extreme-state pairs before being
    reported as candidates.
    """
    rng = rng or np.random.default_rng(0)
    coarse = _ordered_state_pairs(L, state_samples, rng)
    elements = []
    members_included = 0
    for k in range(element_samples):
        if k % 3 == 0:
            elements.append((L.random_member(rng), True))
            members_included += 1
        else:
            blocks = [random_herm(rng, c.dim, scale=1.0) for c in L.components]
            elements.append((blocks, False))
    report = SaturationReport(elements_checked=len(elements),
                              members_included=members_included,
                              flagged_coarse=0, eliminated_by_densification=0)
    for blocks, is_member_by_construction in elements:
        member = lex_membership(L, blocks)
        isotone = _isotone_on_pairs(L, blocks, coarse, tol)
        if is_member_by_construction and not member:
            raise AssertionError("constructed member failed membership")
        if member:
            continue  # members are isotone by definition of the induced order
        if not isotone:
            continue
        report.flagged_coarse += 1
        dense = _ordered_state_pairs(L, 10 * state_samples, rng)
        dense += _targeted_pairs(L, blocks, rng)
        if _isotone_on_pairs(L, blocks, dense, tol):
            report.survivors.append([b.to_json() for b in blocks])
        else:
            report.eliminated_by_densification += 1
    return report
