"""Closed-form Green functions, capacities, and curve sampling for model condensers.

The plate E is a closed disk or a segment; D denotes the complement of E in the
extended plane.  All Green quantities are evaluated through the conformal map
``phi`` of D onto the exterior of the unit disk:

  disk(c, r):     phi(z) = (z - c) / r
  segment(a, b):  phi(z) = w + sqrt(w^2 - 1),  w = (2z - a - b) / (b - a),
                  branch chosen so |phi| >= 1 off the segment.

With that map, g(z, infinity) = log|phi(z)| and

  g(z, t) = log|1 - phi(z) * conj(phi(t))| - log|phi(z) - phi(t)|,

both clamped to 0 on E (the convention used throughout: potentials of measures
with mass on E stay well defined).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CoincidentPole, GeometryValidationError, UnsupportedCurve

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class EDomain:
    """The plate E: a closed disk or a real segment."""

    kind: str  # "disk" or "segment"
    center: complex = 0j
    radius: float = 0.0
    a: float = 0.0
    b: float = 0.0

    @staticmethod
    def disk(center: complex, radius: float) -> "EDomain":
        if radius <= 0:
            raise GeometryValidationError("disk radius must be positive")
        return EDomain(kind="disk", center=complex(center), radius=float(radius))

    @staticmethod
    def segment(a: float, b: float) -> "EDomain":
        if not b > a:
            raise GeometryValidationError("segment requires b > a")
        return EDomain(kind="segment", a=float(a), b=float(b))

    def to_json_dict(self):
        if self.kind == "disk":
            return {"kind": "disk", "center": [self.center.real, self.center.imag],
                    "radius": self.radius}
        return {"kind": "segment", "a": self.a, "b": self.b}

    @staticmethod
    def from_json_dict(d) -> "EDomain":
        if d["kind"] == "disk":
            return EDomain.disk(complex(d["center"][0], d["center"][1]), d["radius"])
        if d["kind"] == "segment":
            return EDomain.segment(d["a"], d["b"])
        raise GeometryValidationError(f"unknown E domain kind {d['kind']!r}")


@dataclass(frozen=True)
class CurveSpec:
    """The outer Jordan curve, parameterized over [0, 2*pi)."""

    kind: str  # "circle", "ellipse" or "polar"
    center: complex = 0j
    radius: float = 0.0
    semi_axes: tuple = (0.0, 0.0)
    rotation: float = 0.0
    polar_angles: tuple = ()
    polar_radii: tuple = ()

    @staticmethod
    def circle(center: complex, radius: float) -> "CurveSpec":
        if radius <= 0:
            raise GeometryValidationError("circle radius must be positive")
        return CurveSpec(kind="circle", center=complex(center), radius=float(radius))

    @staticmethod
    def ellipse(center: complex, semi_axes, rotation: float = 0.0) -> "CurveSpec":
        sa = (float(semi_axes[0]), float(semi_axes[1]))
        if min(sa) <= 0:
            raise GeometryValidationError("ellipse semi-axes must be positive")
        return CurveSpec(kind="ellipse", center=complex(center), semi_axes=sa,
                         rotation=float(rotation))

    @staticmethod
    def polar(center: complex, angles, radii) -> "CurveSpec":
        ang = tuple(float(t) for t in angles)
        rad = tuple(float(r) for r in radii)
        if len(ang) != len(rad) or len(ang) < 4:
            raise GeometryValidationError("polar table needs >= 4 (angle, radius) samples")
        if min(rad) <= 0:
            raise GeometryValidationError("polar radii must be positive")
        if any(ang[i + 1] <= ang[i] for i in range(len(ang) - 1)):
            raise GeometryValidationError("polar angles must be strictly increasing")
        return CurveSpec(kind="polar", center=complex(center),
                         polar_angles=ang, polar_radii=rad)

    # -- parameterization --------------------------------------------------

    def point(self, t):
        """Curve point(s) at parameter(s) t in [0, 2*pi)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "circle":
            return self.center + self.radius * np.exp(1j * t)
        if self.kind == "ellipse":
            a, b = self.semi_axes
            return self.center + np.exp(1j * self.rotation) * (a * np.cos(t) + 1j * b * np.sin(t))
        if self.kind == "polar":
            r = self._polar_radius(t)
            return self.center + r * np.exp(1j * t)
        raise UnsupportedCurve(f"unknown curve kind {self.kind!r}")

    def _polar_radius(self, t):
        ang = np.asarray(self.polar_angles)
        rad = np.asarray(self.polar_radii)
        # periodic linear interpolation of the radius table
        ext_ang = np.concatenate([ang, [ang[0] + TWO_PI]])
        ext_rad = np.concatenate([rad, [rad[0]]])
        return np.interp(np.mod(t - ang[0], TWO_PI) + ang[0], ext_ang, ext_rad)

    def speed(self, t):
        """|gamma'(t)| used for arclength quadrature weights."""
        t = np.asarray(t, dtype=float)
        if self.kind == "circle":
            return np.full_like(t, self.radius)
        if self.kind == "ellipse":
            a, b = self.semi_axes
            return np.hypot(a * np.sin(t), b * np.cos(t))
        if self.kind == "polar":
            h = 1e-5
            r = self._polar_radius(t)
            dr = (self._polar_radius(t + h) - self._polar_radius(t - h)) / (2 * h)
            return np.hypot(r, dr)
        raise UnsupportedCurve(f"unknown curve kind {self.kind!r}")

    def to_json_dict(self):
        if self.kind == "circle":
            return {"kind": "circle", "center": [self.center.real, self.center.imag],
                    "radius": self.radius}
        if self.kind == "ellipse":
            return {"kind": "ellipse", "center": [self.center.real, self.center.imag],
                    "semi_axes": list(self.semi_axes), "rotation": self.rotation}
        return {"kind": "polar", "center": [self.center.real, self.center.imag],
                "angles": list(self.polar_angles), "radii": list(self.polar_radii)}

    @staticmethod
    def from_json_dict(d) -> "CurveSpec":
        if d["kind"] == "circle":
            return CurveSpec.circle(complex(d["center"][0], d["center"][1]), d["radius"])
        if d["kind"] == "ellipse":
            return CurveSpec.ellipse(complex(d["center"][0], d["center"][1]),
                                     d["semi_axes"], d.get("rotation", 0.0))
        if d["kind"] == "polar":
            return CurveSpec.polar(complex(d["center"][0], d["center"][1]),
                                   d["angles"], d["radii"])
        raise GeometryValidationError(f"unknown curve kind {d['kind']!r}")


@dataclass(frozen=True)
class CurveSamples:
    """Equispaced-parameter samples of a curve with arclength quadrature weights."""

    params: np.ndarray
    points: np.ndarray
    weights: np.ndarray


def sample_curve(gamma: CurveSpec, n: int) -> CurveSamples:
    """Sample n points at equispaced parameters, with per-sample arclength weights.

    Circle weights are exact (2*pi*r/n); other kinds use |gamma'| * h.
    """
    if n < 4:
        raise GeometryValidationError("sample_curve needs n >= 4")
    t = TWO_PI * np.arange(n) / n
    pts = gamma.point(t)
    if gamma.kind == "circle":
        w = np.full(n, TWO_PI * gamma.radius / n)
    else:
        w = gamma.speed(t) * (TWO_PI / n)
    return CurveSamples(params=t, points=pts, weights=w)


# ---------------------------------------------------------------------------
# conformal map and Green functions


def phi_exterior(e: EDomain, z):
    """Conformal map of D onto {|w| > 1}; |phi| <= 1 marks points of E."""
    z = np.asarray(z, dtype=complex)
    if e.kind == "disk":
        return (z - e.center) / e.radius
    w = (2.0 * z - (e.a + e.b)) / (e.b - e.a)
    s = np.sqrt(w * w - 1.0)
    plus, minus = w + s, w - s
    return np.where(np.abs(plus) >= np.abs(minus), plus, minus)


def green_pole_infinity(e: EDomain, z):
    """g(z, infinity) for D, continuous, equal to 0 on E."""
    az = np.abs(phi_exterior(e, z))
    with np.errstate(divide="ignore"):
        g = np.log(np.maximum(az, 1.0))
    if np.ndim(z) == 0:
        return float(g)
    return g


def kernel_from_phi(phi_z, phi_t):
    """Green kernel from precomputed phi values; broadcasts like numpy.

    Returns 0 where either argument maps into the closed unit disk and +inf
    where the arguments coincide outside it.
    """
    phi_z = np.asarray(phi_z)
    phi_t = np.asarray(phi_t)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.log(np.abs(1.0 - phi_z * np.conj(phi_t))) - np.log(np.abs(phi_z - phi_t))
    inside = (np.abs(phi_z) <= 1.0) | (np.abs(phi_t) <= 1.0)
    return np.where(inside, 0.0, val)


def green_kernel(e: EDomain, z, t):
    """g(z, t), the Green function of D with pole at t, clamped to 0 on E.

    z may be an array; t is a single pole.  Raises CoincidentPole when z and t
    coincide (within 1e-14) outside E.
    """
    t = complex(t)
    pz = phi_exterior(e, z)
    pt = complex(phi_exterior(e, t))
    if abs(pt) > 1.0:
        close = np.abs(np.asarray(z, dtype=complex) - t) <= 1e-14
        if np.any(close & (np.abs(pz) > 1.0)):
            raise CoincidentPole(f"green_kernel pole at z = t = {t}")
    val = kernel_from_phi(pz, pt)
    if np.ndim(z) == 0:
        return float(val)
    return val


def green_exterior_gamma(gamma: CurveSpec, z):
    """Green function of the unbounded component outside a circular curve."""
    if gamma.kind != "circle":
        raise UnsupportedCurve("exterior Green function implemented for circles only")
    z = np.asarray(z, dtype=complex)
    val = np.log(np.abs(z - gamma.center) / gamma.radius)
    if np.any(val < -1e-9):
        raise GeometryValidationError("green_exterior_gamma called at a point inside the curve")
    out = np.maximum(val, 0.0)
    if np.ndim(z) == 0:
        return float(out)
    return out


def log_capacity(e: EDomain) -> float:
    """Logarithmic capacity: r for a disk, (b - a)/4 for a segment."""
    if e.kind == "disk":
        return e.radius
    return (e.b - e.a) / 4.0


# ---------------------------------------------------------------------------
# plate sampling


def boundary_samples(e: EDomain, n: int) -> np.ndarray:
    """n samples of the plate boundary, in parameter order.

    For a segment the grid includes both endpoints and the midpoint; n is
    bumped to the next odd value so the midpoint is hit exactly.
    """
    if n < 3:
        raise GeometryValidationError("boundary_samples needs n >= 3")
    if e.kind == "disk":
        t = TWO_PI * np.arange(n) / n
        return e.center + e.radius * np.exp(1j * t)
    if n % 2 == 0:
        n += 1
    x = np.linspace(e.a, e.b, n)
    return x.astype(complex)


def interior_spots(e: EDomain, n: int = 64) -> np.ndarray:
    """Deterministic interior probe points (empty for a segment)."""
    if e.kind != "disk":
        return np.empty(0, dtype=complex)
    rings = max(1, int(round(np.sqrt(n))))
    per = max(1, n // rings)
    radii = e.radius * (np.arange(rings) + 1.0) / (rings + 1.0)
    angles = TWO_PI * np.arange(per) / per
    pts = (e.center + radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    return pts[:n]


# ---------------------------------------------------------------------------
# validation


def winding_number(curve_pts: np.ndarray, z0) -> int:
    """Winding number of a closed sampled curve about z0, by summed argument increments."""
    ang = np.angle(curve_pts - z0)
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = np.mod(d + np.pi, TWO_PI) - np.pi
    return int(round(d.sum() / TWO_PI))


def _segments_intersect(p1, p2, q1, q2):
    # orientation predicate on complex endpoints, vectorized over q pairs
    def cross(o, a, b):
        return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)

    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    return ((d1 * d2) < 0) & ((d3 * d4) < 0)


def _jordan_check(pts: np.ndarray) -> bool:
    """Sampled self-intersection test on the closed polygon through pts."""
    n = len(pts)
    a = pts
    b = np.roll(pts, -1)
    for i in range(n - 2):
        j0 = i + 2
        j1 = n if i > 0 else n - 1  # skip the wrap-adjacent edge for i = 0
        if j0 >= j1:
            continue
        hit = _segments_intersect(a[i], b[i], a[j0:j1], b[j0:j1])
        if np.any(hit):
            return False
    return True


@dataclass(frozen=True)
class Condenser:
    """A validated plate/curve pair (E, Gamma) with E inside the curve."""

    e_domain: EDomain
    gamma: CurveSpec
    validated: bool = field(default=False, compare=False)

    def validate(self, samples: int = 4096, boundary_checks: int = 256,
                 jordan_samples: int = 512) -> "Condenser":
        """Run the sampled geometric checks; raises GeometryValidationError on failure."""
        curve = sample_curve(self.gamma, samples).points

        g = green_pole_infinity(self.e_domain, curve)
        if np.min(g) <= 0.0:
            raise GeometryValidationError(
                "winding/positivity check failed: Gamma touches or intersects E "
                "(min over curve samples of g(.,inf) is not positive)")

        if self.e_domain.kind == "disk":
            inner = self.e_domain.center
        else:
            inner = complex(0.5 * (self.e_domain.a + self.e_domain.b), 0.0)
        if winding_number(curve, inner) != 1:
            raise GeometryValidationError(
                "winding-number check failed: Gamma does not wind once around E")

        for z in boundary_samples(self.e_domain, boundary_checks):
            if winding_number(curve, z) != 1:
                raise GeometryValidationError(
                    f"winding-number check failed at E boundary sample {z}")

        if not _jordan_check(sample_curve(self.gamma, min(samples, jordan_samples)).points):
            raise GeometryValidationError("Jordan check failed: sampled curve self-intersects")

        return Condenser(self.e_domain, self.gamma, validated=True)

    def to_json_dict(self):
        return {"e": self.e_domain.to_json_dict(), "gamma": self.gamma.to_json_dict()}

    @staticmethod
    def from_json_dict(d) -> "Condenser":
        return Condenser(EDomain.from_json_dict(d["e"]), CurveSpec.from_json_dict(d["gamma"]))


def concentric_condenser(radius_e: float = 1.0, rho: float = float(np.e)) -> Condenser:
    """Unit-style pair: E = disk(0, radius_e), Gamma the level curve |z| = radius_e * rho."""
    return Condenser(EDomain.disk(0j, radius_e),
                     CurveSpec.circle(0j, radius_e * rho)).validate()


def offset_condenser() -> Condenser:
    """The running example: E the closed unit disk, Gamma the circle |z - 1| = 3."""
    return Condenser(EDomain.disk(0j, 1.0), CurveSpec.circle(1 + 0j, 3.0)).validate()
