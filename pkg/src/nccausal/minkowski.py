"""Geometry of the two-dimensional Minkowski plane.

Causal order, Lorentz distance, light-cone coordinates, the Penrose
compactification onto the closed square [-pi, pi]^2, and the deformed
order that replaces forward light cones with forward hyperbolae of a
given mass scale, extended to the compactification boundary by the
product order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

PI = math.pi


@dataclass(frozen=True)
class Event:
    """Point of the Minkowski plane in Cartesian coordinates (time, space)."""

    x0: float
    x1: float

    @property
    def u(self) -> float:
        return self.x0 + self.x1

    @property
    def v(self) -> float:
        return self.x0 - self.x1

    @classmethod
    def from_lightcone(cls, u: float, v: float) -> "Event":
        return cls((u + v) / 2.0, (u - v) / 2.0)


@dataclass(frozen=True)
class PenrosePoint:
    """Point of the compactified plane; |mu| = pi or |nu| = pi is the boundary."""

    mu: float
    nu: float

    def __post_init__(self):
        if abs(self.mu) > PI or abs(self.nu) > PI:
            raise ValueError("penrose coordinates must lie in [-pi, pi]")

    @property
    def is_boundary(self) -> bool:
        return abs(self.mu) == PI or abs(self.nu) == PI


def causal_leq(x: Event, y: Event) -> bool:
    """Causal order: the product order on light-cone coordinates."""
    return y.u >= x.u and y.v >= x.v


def lorentz_distance(x: Event, y: Event) -> float:
    """Proper time from x to y along the straight line; 0 when not causal."""
    if not causal_leq(x, y):
        return 0.0
    return math.sqrt(max(0.0, (y.u - x.u) * (y.v - x.v)))


def penrose_map(x: Event) -> PenrosePoint:
    """Compactification (u, v) -> (2 atan u, 2 atan v)."""
    return PenrosePoint(2.0 * math.atan(x.u), 2.0 * math.atan(x.v))


def penrose_inverse(p: PenrosePoint) -> Event:
    """Inverse of the compactification; defined on interior points only."""
    if p.is_boundary:
        raise ValueError("boundary points have no preimage in the plane")
    return Event.from_lightcone(math.tan(p.mu / 2.0), math.tan(p.nu / 2.0))


def _check_mass(lam: float) -> float:
    lam = float(lam)
    if lam < 0.0:
        raise ValueError("mass scale must be non-negative")
    return lam


def _hyperbola_eps(lam: float) -> float:
    # Relative knife-edge band: tan/atan roundtrips perturb exact
    # equality cases (separation exactly lam) by a few ulps.
    return 1e-12 * max(1.0, lam * lam)


def lambda_leq(p: PenrosePoint, q: PenrosePoint, lam: float) -> bool:
    """Deformed order on the compactified plane (canonical form).

    Interior pairs are related when both light-cone displacements are
    non-negative and their product reaches lam^2 (equal points are
    related for every lam).  As soon as either point sits on the
    boundary, the product order on (mu, nu) applies instead.
    """
    lam = _check_mass(lam)
    if p == q:
        return True
    if p.is_boundary or q.is_boundary:
        return q.mu >= p.mu and q.nu >= p.nu
    du = math.tan(q.mu / 2.0) - math.tan(p.mu / 2.0)
    dv = math.tan(q.nu / 2.0) - math.tan(p.nu / 2.0)
    return du >= 0.0 and dv >= 0.0 and du * dv >= lam * lam - _hyperbola_eps(lam)


def lambda_leq_cartesian(x: Event, y: Event, lam: float) -> bool:
    """Deformed order in Cartesian coordinates (equivalent interior form)."""
    lam = _check_mass(lam)
    if x == y:
        return True
    d0 = y.x0 - x.x0
    d1 = y.x1 - x.x1
    return d0 >= 0.0 and d0 * d0 - d1 * d1 >= lam * lam - _hyperbola_eps(lam)


def lambda_leq_lightcone(u1: float, v1: float, u2: float, v2: float, lam: float) -> bool:
    """Deformed order in light-cone coordinates (equivalent interior form).

    The explicit dv >= 0 check guards the degenerate du = 0 case at
    lam = 0, where the product condition alone would be vacuous.
    """
    lam = _check_mass(lam)
    if u1 == u2 and v1 == v2:
        return True
    du = u2 - u1
    dv = v2 - v1
    return du >= 0.0 and dv >= 0.0 and du * dv >= lam * lam - _hyperbola_eps(lam)


def lambda_closedness_probe(p: PenrosePoint, lam: float,
                            rings: int = 24, per_ring: int = 180) -> float:
    """Radius of a punctured (mu, nu)-ball around p free of comparable points.

    Exists for every positive mass scale because comparability forces a
    Lorentz separation of at least lam while displacements shrink
    linearly with the ball radius.  The returned radius is verified by
    dense sampling of the punctured ball; it is non-decreasing in lam
    at a fixed base point.
    """
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("closedness probe requires a positive mass scale")
    if p.is_boundary:
        raise ValueError("closedness probe is defined for interior points only")
    margin = 0.5 * min(PI - abs(p.mu), PI - abs(p.nu))
    # Derivative bound for tan(./2) on the margin interval around p.
    slope_u = 0.5 / math.cos((abs(p.mu) + margin) / 2.0) ** 2
    slope_v = 0.5 / math.cos((abs(p.nu) + margin) / 2.0) ** 2
    radius = min(margin, 0.5 * lam / math.sqrt(slope_u * slope_v))
    for k in range(1, rings + 1):
        r = radius * k / rings
        for j in range(per_ring):
            ang = 2.0 * PI * j / per_ring
            q = PenrosePoint(p.mu + r * math.cos(ang), p.nu + r * math.sin(ang))
            if lambda_leq(p, q, lam) or lambda_leq(q, p, lam):
                raise RuntimeError("closedness probe found a comparable point")
    return radius


def point_to_json(point, system: str | None = None) -> dict:
    """Tagged JSON for plane points: cartesian, lightcone or penrose."""
    if isinstance(point, PenrosePoint):
        return {"system": "penrose", "coords": [point.mu, point.nu]}
    if isinstance(point, Event):
        if system == "lightcone":
            return {"system": "lightcone", "coords": [point.u, point.v]}
        return {"system": "cartesian", "coords": [point.x0, point.x1]}
    raise TypeError(f"cannot serialize {type(point).__name__}")


def point_from_json(obj: dict):
    system = obj["system"]
    a, b = (float(c) for c in obj["coords"])
    if system == "cartesian":
        return Event(a, b)
    if system == "lightcone":
        return Event.from_lightcone(a, b)
    if system == "penrose":
        return PenrosePoint(a, b)
    raise ValueError(f"unknown coordinate system {system!r}")
