"""Rate predictors for the polynomial-class width problem, wired to the chi
machinery as the computable lower-bound handle.

Direct computation of optimal approximating subspaces is out of scope; the
module reports the theta-rate (the curve constant), the small-theta rate
(minus the reciprocal condenser capacity), and chi-based lower bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import condenser_capacity, m_theta
from .errors import GridTooClose
from .extremal import chi_asymptotic_pair, chi_bruteforce
from .geometry import (Condenser, green_pole_infinity, kernel_from_phi,
                       phi_exterior)
from .measure import DiscreteMeasure, FieldGrid


@dataclass(frozen=True)
class WidthReport:
    """Predicted n-th root rate, the small-theta rate, and chi lower bounds."""

    theta: float
    predicted_rate: float       # the curve constant at theta (field route)
    widom_rate: float           # -1 / cp(E, Gamma), the per-k rate as theta -> 0
    chi_lower_bounds: list      # (n, k, (1/n) log chi estimate) triples
    field_grid: FieldGrid | None = None
    normalization: str = "per-n"

    def to_json_dict(self):
        d = {"theta": self.theta, "predicted_rate": self.predicted_rate,
             "widom_rate": self.widom_rate, "normalization": self.normalization,
             "chi_lower_bounds": [[n, k, r] for n, k, r in self.chi_lower_bounds]}
        if self.field_grid is not None:
            d["field_grid"] = self.field_grid.to_json_dict()
        return d


def width_rate_predict(c: Condenser, theta: float, n_points: int = 256,
                       grid_n: int = 4096, seed: int = 0) -> WidthReport:
    """Rate report at one theta.

    predicted_rate is the field-route curve constant; at theta = 0 the
    meaningful statement is per-k, so the report is flagged accordingly and
    the headline number is the widom_rate.
    """
    _, m_field = m_theta(c, theta, n_points, grid_n, seed)
    cap = condenser_capacity(c, m=min(256, max(8, grid_n // 16)), grid_n=grid_n, seed=seed)
    normalization = "per-k for theta=0" if theta <= 1e-12 else "per-n"
    return WidthReport(theta=float(theta), predicted_rate=m_field,
                       widom_rate=-1.0 / cap, chi_lower_bounds=[],
                       normalization=normalization)


def width_lower_bound(c: Condenser, n: int, k: int, grid_n: int = 2048,
                      seed: int = 0) -> float:
    """chi-based lower bound for the width at (n, k): any candidate q gives
    inf over p of the norm ratio, which sits below chi and hence below the
    width.  Small n goes through the nested search, larger n through the
    equilibrium pair."""
    if n <= 6:
        est = chi_bruteforce(c, n, k, grid_n=grid_n, seed=seed)
    else:
        est = chi_asymptotic_pair(c, n, k, grid_n=grid_n, seed=seed)
    return est.chi_lower


def g_theta_field(c: Condenser, lambda_n: DiscreteMeasure, grid) -> FieldGrid:
    """Values of U_D^{lambda_n} - g(., inf) on a caller grid.

    Thresholding the values at the curve constant draws the level region used
    by the width theorems.  The grid must stay 1e-3 away from the atoms.
    """
    pts = np.asarray(grid, dtype=complex).ravel()
    if not lambda_n.is_zero and pts.size:
        d = np.min(np.abs(pts[:, None] - lambda_n.points[None, :]), axis=1)
        if np.min(d) < 1e-3:
            raise GridTooClose("field grid comes within 1e-3 of the measure support")
    g_inf = np.atleast_1d(green_pole_infinity(c.e_domain, pts))
    if lambda_n.is_zero:
        vals = -g_inf
    else:
        kern = kernel_from_phi(phi_exterior(c.e_domain, pts)[:, None],
                               phi_exterior(c.e_domain, lambda_n.points)[None, :])
        vals = kern @ lambda_n.weights - g_inf
    return FieldGrid(grid_points=pts, values=vals,
                     description="U_D^lambda - g(., inf)")
