"""Discrete measures, logarithmic and Green potentials, energies, and the
minimax functional M(sigma) = min over the curve of U^sigma minus min over the
plate of U^sigma."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import parallel
from .errors import CoincidentPole, EmptyMeasure, MassMismatch
from .geometry import (Condenser, EDomain, boundary_samples, green_pole_infinity,
                       interior_spots, kernel_from_phi, phi_exterior, sample_curve)

# distance clamp under the log; prevents -inf without disturbing any tested digit
LOG_CLAMP = 1e-300


class DiscreteMeasure:
    """A finite positive measure given by weighted atoms.

    Exact duplicate atoms are merged at construction (weights summed, first
    occurrence keeps its slot).  The zero measure (no atoms) is legal.
    """

    __slots__ = ("points", "weights")

    def __init__(self, points, weights):
        pts = np.asarray(points, dtype=complex).ravel()
        wts = np.asarray(weights, dtype=float).ravel()
        if pts.shape != wts.shape:
            raise ValueError("points and weights must have the same length")
        if pts.size and (not np.all(np.isfinite(wts)) or not np.all(np.isfinite(pts.view(float)))):
            raise ValueError("points and weights must be finite")
        if np.any(wts <= 0):
            raise ValueError("weights must be positive")
        if pts.size:
            merged: dict[complex, float] = {}
            for p, w in zip(pts.tolist(), wts.tolist()):
                merged[p] = merged.get(p, 0.0) + w
            pts = np.array(list(merged.keys()), dtype=complex)
            wts = np.array(list(merged.values()), dtype=float)
        self.points = pts
        self.weights = wts

    @staticmethod
    def zero() -> "DiscreteMeasure":
        return DiscreteMeasure(np.empty(0, dtype=complex), np.empty(0))

    @staticmethod
    def atom(point: complex, weight: float = 1.0) -> "DiscreteMeasure":
        return DiscreteMeasure([point], [weight])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def is_zero(self) -> bool:
        return self.points.size == 0

    def __len__(self) -> int:
        return int(self.points.size)

    def scaled(self, c: float) -> "DiscreteMeasure":
        if self.is_zero:
            return DiscreteMeasure.zero()
        return DiscreteMeasure(self.points, c * self.weights)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return DiscreteMeasure(np.concatenate([self.points, other.points]),
                               np.concatenate([self.weights, other.weights]))

    def to_json_dict(self):
        return {"points": [[p.real, p.imag] for p in self.points.tolist()],
                "weights": self.weights.tolist()}

    @staticmethod
    def from_json_dict(d) -> "DiscreteMeasure":
        pts = [complex(re, im) for re, im in d["points"]]
        return DiscreteMeasure(pts, d["weights"])


@dataclass(frozen=True)
class FieldGrid:
    """Values of a named scalar field on a list of grid points."""

    grid_points: np.ndarray
    values: np.ndarray
    description: str = ""

    def __post_init__(self):
        if np.shape(self.grid_points) != np.shape(self.values):
            raise ValueError("grid_points and values must have the same length")

    def to_json_dict(self):
        return {"description": self.description,
                "grid_points": [[z.real, z.imag] for z in np.asarray(self.grid_points).tolist()],
                "values": np.asarray(self.values).tolist()}


# ---------------------------------------------------------------------------
# potentials


def log_potential(mu: DiscreteMeasure, z):
    """U^mu(z) = -sum_i w_i log|z - x_i|, with a 1e-300 distance clamp."""
    if mu.is_zero:
        return 0.0 if np.ndim(z) == 0 else np.zeros(np.shape(z))
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(zs.shape)

    def block(lo, hi):
        d = np.abs(zs[lo:hi, None] - mu.points[None, :])
        out[lo:hi] = -np.sum(mu.weights * np.log(np.maximum(d, LOG_CLAMP)), axis=1)
        return None

    parallel.run_chunked(block, zs.size, chunk=max(1, 2 ** 22 // max(1, len(mu))))
    if np.ndim(z) == 0:
        return float(out[0])
    return out


def green_potential(mu: DiscreteMeasure, e: EDomain, z):
    """Green potential sum_i w_i g(z, x_i); zero on E, nonnegative on D.

    Raises CoincidentPole when z coincides with a support atom outside E.
    """
    if mu.is_zero:
        return 0.0 if np.ndim(z) == 0 else np.zeros(np.shape(z))
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    pz = phi_exterior(e, zs)
    pt = phi_exterior(e, mu.points)
    out = np.empty(zs.shape)

    def block(lo, hi):
        k = kernel_from_phi(pz[lo:hi, None], pt[None, :])
        if np.any(np.isinf(k)):
            raise CoincidentPole("green_potential evaluated at a support atom")
        out[lo:hi] = np.sum(mu.weights * k, axis=1)
        return None

    parallel.run_chunked(block, zs.size, chunk=max(1, 2 ** 22 // max(1, len(mu))))
    if np.ndim(z) == 0:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# energies


def _check_mass(total: float, required: float):
    if abs(total - required) > 1e-9:
        raise MassMismatch(f"measure mass {total!r} does not match required {required!r}")


def energy_J(lam: DiscreteMeasure, e: EDomain, theta: float) -> float:
    """Discrete weighted Green energy

        J(lam) = sum_{i != j} w_i w_j g(x_i, x_j) - 2 sum_i w_i g(x_i, inf).

    The diagonal is excluded (point atoms have infinite self-energy).  The mass
    of lam must equal 1 - theta; theta = 1 pairs with the zero measure.
    """
    _check_mass(lam.total_mass if not lam.is_zero else 0.0, 1.0 - theta)
    if lam.is_zero:
        return 0.0
    p = phi_exterior(e, lam.points)
    k = kernel_from_phi(p[:, None], p[None, :])
    np.fill_diagonal(k, 0.0)
    pair = float(lam.weights @ k @ lam.weights)
    g_inf = green_pole_infinity(e, lam.points)
    return pair - 2.0 * float(np.sum(lam.weights * g_inf))


def energy_I(mu: DiscreteMeasure, lambda_theta: DiscreteMeasure, theta: float) -> float:
    """Discrete logarithmic energy with the external field of lambda_theta:

        I(mu) = -sum_{i != j} w_i w_j log|x_i - x_j| + 2 sum_i w_i U^lambda(x_i).
    """
    _check_mass(mu.total_mass if not mu.is_zero else 0.0, theta)
    if mu.is_zero:
        return 0.0
    d = np.abs(mu.points[:, None] - mu.points[None, :])
    logd = np.log(np.maximum(d, LOG_CLAMP))
    np.fill_diagonal(logd, 0.0)
    pair = -float(mu.weights @ logd @ mu.weights)
    ext = log_potential(lambda_theta, mu.points)
    return pair + 2.0 * float(np.sum(mu.weights * np.atleast_1d(ext)))


# ---------------------------------------------------------------------------
# minimax functional


def minimax_scan_sets(c: Condenser, gamma_grid_n: int = 4096, e_grid_n: int = 4096,
                      spots: int = 64):
    """Evaluation sets used by M and by polynomial norm ratios.

    Returns (curve samples, plate samples) where the plate set is the boundary
    grid plus interior spot checks.  Both M_functional and the norm-ratio
    evaluation scan exactly these sets, which keeps the two sides of the
    log-norm identity in exact agreement.
    """
    gamma_pts = sample_curve(c.gamma, gamma_grid_n).points
    e_pts = boundary_samples(c.e_domain, e_grid_n)
    sp = interior_spots(c.e_domain, spots)
    if sp.size:
        e_pts = np.concatenate([e_pts, sp])
    return gamma_pts, e_pts


def M_functional(sigma: DiscreteMeasure, c: Condenser,
                 gamma_grid_n: int = 4096, e_grid_n: int = 4096) -> float:
    """M(sigma) = min over curve samples of U^sigma - min over plate samples.

    U^sigma is superharmonic, so its minimum over the plate sits on the
    boundary; the interior spot checks in the plate set only guard against
    implementation bugs.
    """
    if sigma.is_zero:
        raise EmptyMeasure("M is undefined for the zero measure")
    gamma_pts, e_pts = minimax_scan_sets(c, gamma_grid_n, e_grid_n)
    u_gamma = log_potential(sigma, gamma_pts)
    u_e = log_potential(sigma, e_pts)
    return float(np.min(u_gamma) - np.min(u_e))
