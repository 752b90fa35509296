"""Weighted Fekete points on the curve, weighted Leja points on the plate,
and the extremal constants they estimate.

Two independent routes to the curve constant are kept side by side:

  energy route:  (J(lam_n) + sum_i w_i g(x_i, inf)) / (1 - theta)
  field route:   min over the curve grid of U_D^{lam_n} - g(., inf)

Their gap is a discretization residual and shrinks as the point count grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse
from .geometry import (Condenser, TWO_PI, green_pole_infinity, kernel_from_phi,
                       log_capacity, boundary_samples, phi_exterior, sample_curve)
from .measure import DiscreteMeasure, energy_J, log_potential

_ENDPOINT_TOL = 1e-12


@dataclass(frozen=True)
class EquilibriumResult:
    """Discretized curve/plate equilibrium pair with constants and diagnostics."""

    theta: float
    lambda_n: DiscreteMeasure
    mu_n: DiscreteMeasure
    m_theta_energy: float
    m_theta_field: float
    m_hat_theta: float
    support_arcs: list
    residuals: dict

    def to_json_dict(self):
        return {"theta": self.theta,
                "lambda_n": self.lambda_n.to_json_dict(),
                "mu_n": self.mu_n.to_json_dict(),
                "m_theta_energy": self.m_theta_energy,
                "m_theta_field": self.m_theta_field,
                "m_hat_theta": self.m_hat_theta,
                "support_arcs": [list(arc) for arc in self.support_arcs],
                "residuals": dict(self.residuals)}


@dataclass(frozen=True)
class SweepReport:
    """Per-theta constants, capacities, and cross-check residuals."""

    thetas: list
    m_theta_energy: list
    m_theta_field: list
    m_hat_theta: list
    cap_condenser: float
    cap_s_tau: list
    support_arcs: list
    integral_check_residual: float
    monotone_m: bool
    monotone_m_hat: bool

    def to_json_dict(self):
        return {"thetas": list(self.thetas),
                "m_theta_energy": list(self.m_theta_energy),
                "m_theta_field": list(self.m_theta_field),
                "m_hat_theta": list(self.m_hat_theta),
                "cap_condenser": self.cap_condenser,
                "cap_s_tau": list(self.cap_s_tau),
                "support_arcs": [[list(a) for a in arcs] for arcs in self.support_arcs],
                "integral_check_residual": self.integral_check_residual,
                "monotone_m": self.monotone_m,
                "monotone_m_hat": self.monotone_m_hat}

    def csv_rows(self):
        """Rows for the documented CSV: theta, m_energy, m_field, m_hat, cap_S_tau, residuals."""
        rows = [("theta", "m_energy", "m_field", "m_hat", "cap_S_tau", "residuals")]
        for i, t in enumerate(self.thetas):
            rows.append((repr(t), repr(self.m_theta_energy[i]), repr(self.m_theta_field[i]),
                         repr(self.m_hat_theta[i]), repr(self.cap_s_tau[i]),
                         repr(abs(self.m_theta_energy[i] - self.m_theta_field[i]))))
        return rows


# ---------------------------------------------------------------------------
# exchange engine on a fixed grid


def _exchange_maximize(phi_grid, g_inf, m, field_coeff, seed, max_passes=200):
    """Greedy insertion plus single-point exchange passes maximizing

        F = -sum_{i<j} g(z_i, z_j) + field_coeff * sum_i g(z_i, inf)

    over m distinct slots of the grid.  Deterministic for a fixed seed: the
    seed only shuffles the exchange visiting order, ties go to the lowest
    grid index, and every accepted move strictly increases F.
    """
    grid_n = phi_grid.size

    def col(idx):
        # kernel column; +inf exactly at the slot itself
        return kernel_from_phi(phi_grid, phi_grid[idx])

    drive = field_coeff * g_inf
    chosen = np.empty(m, dtype=int)
    chosen[0] = int(np.argmax(drive))
    cols = np.empty((m, grid_n))
    cols[0] = col(chosen[0])
    pot = cols[0].copy()
    for j in range(1, m):
        idx = int(np.argmax(drive - pot))  # occupied slots score -inf
        chosen[j] = idx
        cols[j] = col(idx)
        pot = pot + cols[j]

    rng = np.random.default_rng(seed)
    for _ in range(max_passes):
        moved = False
        for i in rng.permutation(m):
            pos = chosen[i]
            with np.errstate(invalid="ignore"):
                base = pot - cols[i]
            # pot and cols[i] are both +inf at pos; recompute that slot exactly
            others = np.concatenate([cols[:i, pos], cols[i + 1:, pos]])
            base[pos] = float(np.sum(others))
            score = drive - base
            best = int(np.argmax(score))
            # strict improvement with a drift guard so float noise cannot cycle
            if score[best] > score[pos] + 1e-12:
                chosen[i] = best
                cols[i] = col(best)
                pot = base + cols[i]
                moved = True
        if not moved:
            break
    return chosen


def _pair_energy(phi_pts, weights):
    """sum_{i != j} w_i w_j g(x_i, x_j), diagonal excluded."""
    k = kernel_from_phi(phi_pts[:, None], phi_pts[None, :])
    np.fill_diagonal(k, 0.0)
    return float(weights @ k @ weights)


def _fekete_state(c: Condenser, theta: float, m: int, grid_n: int, seed: int):
    """Shared solver state: curve samples, chosen indices, and the value of F."""
    if m < 2:
        raise ValueError("fekete stage needs m >= 2")
    if grid_n < 16 * m:
        raise GridTooCoarse(f"grid_n = {grid_n} < 16 * m = {16 * m}")
    samples = sample_curve(c.gamma, grid_n)
    phi_g = phi_exterior(c.e_domain, samples.points)
    g_inf = green_pole_infinity(c.e_domain, samples.points)
    coeff = (m - 1) / (1.0 - theta)
    idx = _exchange_maximize(phi_g, g_inf, m, coeff, seed)
    f_val = (-0.5 * _pair_energy(phi_g[idx], np.ones(m))
             + coeff * float(np.sum(g_inf[idx])))
    return samples, idx, f_val


def fekete_green(c: Condenser, theta: float, m: int, grid_n: int,
                 seed: int = 0) -> DiscreteMeasure:
    """Weighted Fekete configuration on the curve grid, each atom of mass (1-theta)/m."""
    if not 0.0 <= theta < 1.0:
        raise ValueError("fekete_green needs theta in [0, 1)")
    samples, idx, _ = _fekete_state(c, theta, m, grid_n, seed)
    return DiscreteMeasure(samples.points[idx], np.full(m, (1.0 - theta) / m))


def fekete_diameter(c: Condenser, theta: float, m: int, grid_n: int,
                    seed: int = 0) -> float:
    """The m-point scale exp(2 F_pairs / (m (m-1))) of the weighted configuration.

    Non-increasing in m for exact maximizers; used as a sanity diagnostic.
    """
    _, _, f_val = _fekete_state(c, theta, m, grid_n, seed)
    return float(np.exp(2.0 * f_val / (m * (m - 1))))


def leja_weighted(c: Condenser, lambda_n: DiscreteMeasure, theta: float, m: int,
                  grid_n: int) -> DiscreteMeasure:
    """Greedy weighted Leja points on the plate boundary grid.

    Point j+1 maximizes sum_{i <= j} log|z - z_i| - (j / theta) U^{lambda_n}(z);
    the first point maximizes -U^{lambda_n} with ties going to the smallest
    parameter.  Each atom carries mass theta / m.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("leja_weighted needs theta in (0, 1]")
    if m < 1:
        raise ValueError("leja_weighted needs m >= 1")
    if grid_n < 16 * m:
        raise GridTooCoarse(f"grid_n = {grid_n} < 16 * m = {16 * m}")
    grid = boundary_samples(c.e_domain, grid_n)
    u_ext = np.atleast_1d(log_potential(lambda_n, grid))
    chosen = [int(np.argmax(-u_ext))]
    acc = np.log(np.maximum(np.abs(grid - grid[chosen[0]]), 1e-300))
    for j in range(1, m):
        obj = acc - (j / theta) * u_ext
        idx = int(np.argmax(obj))
        chosen.append(idx)
        acc = acc + np.log(np.maximum(np.abs(grid - grid[idx]), 1e-300))
    return DiscreteMeasure(grid[chosen], np.full(m, theta / m))


# ---------------------------------------------------------------------------
# the curve field U_D^{lambda_n} - g(., inf)


def _grid_support_mask(grid_pts: np.ndarray, lam: DiscreteMeasure) -> np.ndarray:
    index = {z: i for i, z in enumerate(grid_pts.tolist())}
    mask = np.zeros(grid_pts.size, dtype=bool)
    if not lam.is_zero:
        for z in lam.points.tolist():
            i = index.get(z)
            if i is not None:
                mask[i] = True
    return mask


def gamma_field(c: Condenser, lam: DiscreteMeasure, grid_n: int = 4096):
    """(params, field values, support mask) of U_D^{lam} - g(., inf) on the curve grid.

    Grid slots occupied by atoms of lam carry the field minimum over the free
    slots (the discrete potential is infinite there; the continuum field
    attains its minimum on the support).
    """
    samples = sample_curve(c.gamma, grid_n)
    phi_g = phi_exterior(c.e_domain, samples.points)
    g_inf = green_pole_infinity(c.e_domain, samples.points)
    mask = _grid_support_mask(samples.points, lam)
    if lam.is_zero:
        vals = -g_inf
        return samples.params, vals, mask
    phi_atoms = phi_exterior(c.e_domain, lam.points)
    vals = np.empty(grid_n)
    free = ~mask
    kern = kernel_from_phi(phi_g[free, None], phi_atoms[None, :])
    vals[free] = kern @ lam.weights - g_inf[free]
    vals[mask] = np.min(vals[free]) if np.any(free) else 0.0
    return samples.params, vals, mask


def m_theta(c: Condenser, theta: float, n_points: int = 256, grid_n: int = 4096,
            seed: int = 0):
    """The curve constant by both routes: (energy estimate, field estimate).

    The endpoints bypass optimization: theta = 0 gives (0, 0) and theta = 1
    gives -max over the curve grid of g(., inf) for both routes.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("m_theta needs theta in [0, 1]")
    if theta <= _ENDPOINT_TOL:
        return 0.0, 0.0
    if theta >= 1.0 - _ENDPOINT_TOL:
        g_inf = green_pole_infinity(c.e_domain, sample_curve(c.gamma, grid_n).points)
        v = -float(np.max(g_inf))
        return v, v
    lam = fekete_green(c, theta, n_points, grid_n, seed)
    return _m_theta_from_lambda(c, lam, theta, grid_n)


def _m_theta_from_lambda(c: Condenser, lam: DiscreteMeasure, theta: float, grid_n: int):
    g_atoms = green_pole_infinity(c.e_domain, lam.points)
    j_val = energy_J(lam, c.e_domain, theta)
    m_energy = (j_val + float(np.sum(lam.weights * g_atoms))) / (1.0 - theta)
    _, vals, mask = gamma_field(c, lam, grid_n)
    m_field = float(np.min(vals[~mask]))
    return m_energy, m_field


def m_hat_theta(c: Condenser, lambda_n: DiscreteMeasure) -> float:
    """The plate constant: -log cp(E) - sum_i w_i g(x_i, inf)."""
    base = -float(np.log(log_capacity(c.e_domain)))
    if lambda_n.is_zero:
        return base
    g_atoms = green_pole_infinity(c.e_domain, lambda_n.points)
    return base - float(np.sum(lambda_n.weights * g_atoms))


def support_S_theta(c: Condenser, lambda_n: DiscreteMeasure, m_field: float,
                    tol: float | None = None, grid_n: int = 4096) -> list:
    """Maximal parameter intervals of the curve grid where the field stays
    within tol of its minimum; the whole curve is reported as [(0, 2*pi)]."""
    if tol is None:
        tol = 1e-2 * abs(m_field) + 1e-4
    params, vals, _ = gamma_field(c, lambda_n, grid_n)
    qualify = vals <= m_field + tol
    return _runs_to_arcs(params, qualify)


def _runs_to_arcs(params: np.ndarray, qualify: np.ndarray) -> list:
    n = params.size
    if np.all(qualify):
        return [(0.0, TWO_PI)]
    if not np.any(qualify):
        return []
    # cyclic runs of qualifying samples
    q = qualify.astype(int)
    starts = np.nonzero(np.diff(np.concatenate([q[-1:], q])) == 1)[0]
    ends = np.nonzero(np.diff(np.concatenate([q, q[:1]])) == -1)[0]
    arcs = []
    for s in starts:
        e = ends[ends >= s][0] if np.any(ends >= s) else ends[0]
        arcs.append((float(params[s]), float(params[e])))
    return arcs


def _arc_mask(params: np.ndarray, arcs: list) -> np.ndarray:
    mask = np.zeros(params.size, dtype=bool)
    for t0, t1 in arcs:
        if t1 >= t0:
            mask |= (params >= t0 - 1e-15) & (params <= t1 + 1e-15)
        else:  # wrapping arc
            mask |= (params >= t0 - 1e-15) | (params <= t1 + 1e-15)
    return mask


def condenser_capacity(c: Condenser, m: int = 256, grid_n: int = 4096,
                       arcs: list | None = None, seed: int = 0) -> float:
    """Condenser (Green) capacity of the curve, or of a union of curve arcs,
    against the plate.

    Minimizes the pure pairwise Green energy of m equal atoms on the grid and
    removes the leading (log m + const)/m defect of the diagonal-excluded sum
    by a two-level fit at m and m/2, so the concentric anchors come out at the
    1e-3 level with a few hundred points.
    """
    if m < 8:
        raise ValueError("condenser_capacity needs m >= 8")
    samples = sample_curve(c.gamma, grid_n)
    keep = np.arange(grid_n) if arcs is None else np.nonzero(_arc_mask(samples.params, arcs))[0]
    if keep.size < 32:
        raise GridTooCoarse("capacity support arcs contain fewer than 32 grid samples")
    phi_g = phi_exterior(c.e_domain, samples.points[keep])
    g_inf = np.zeros(keep.size)

    m1 = min(m, keep.size // 16)
    m2 = m1 // 2
    energies = {}
    for mm in (m1, m2):
        idx = _exchange_maximize(phi_g, g_inf, mm, 0.0, seed)
        energies[mm] = _pair_energy(phi_g[idx], np.full(mm, 1.0 / mm))

    # fit E(m) = E_inf - (log m + b) / m through the two levels
    u1, u2 = 1.0 / m1, 1.0 / m2
    l1, l2 = np.log(m1) / m1, np.log(m2) / m2
    b = (l2 - l1 + energies[m2] - energies[m1]) / (u1 - u2)
    e_inf = energies[m1] + l1 + b * u1
    if e_inf <= 0:
        raise ValueError("capacity fit produced a nonpositive energy")
    return float(1.0 / e_inf)


def equilibrium_result(c: Condenser, theta: float, n_points: int = 256,
                       grid_n: int = 4096, seed: int = 0,
                       support_tol: float | None = None) -> EquilibriumResult:
    """Run the two-stage pipeline at one theta and bundle constants, supports,
    and cross-check residuals."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    at_zero = theta <= _ENDPOINT_TOL
    at_one = theta >= 1.0 - _ENDPOINT_TOL

    if at_one:
        lam = DiscreteMeasure.zero()
    else:
        lam = fekete_green(c, theta, n_points, grid_n, seed)

    if at_zero:
        mu = DiscreteMeasure.zero()
        m_energy = m_field = 0.0
    else:
        mu = leja_weighted(c, lam, theta, n_points, grid_n)
        if at_one:
            g_inf = green_pole_infinity(c.e_domain, sample_curve(c.gamma, grid_n).points)
            m_energy = m_field = -float(np.max(g_inf))
        else:
            m_energy, m_field = _m_theta_from_lambda(c, lam, theta, grid_n)

    _, vals, mask = gamma_field(c, lam, grid_n)
    field_min = float(np.min(vals[~mask])) if np.any(~mask) else m_field
    arcs = support_S_theta(c, lam, field_min, tol=support_tol, grid_n=grid_n)

    support_vals = vals[_arc_mask(sample_curve(c.gamma, grid_n).params, arcs)]
    residuals = {
        "two_route": abs(m_energy - m_field),
        "support_field_stddev": float(np.std(support_vals)) if support_vals.size else 0.0,
    }
    return EquilibriumResult(theta=float(theta), lambda_n=lam, mu_n=mu,
                             m_theta_energy=m_energy, m_theta_field=m_field,
                             m_hat_theta=m_hat_theta(c, lam),
                             support_arcs=arcs, residuals=residuals)


def theta_sweep(c: Condenser, thetas, n_points: int = 160, grid_n: int = 4096,
                seed: int = 0, cap_points: int = 256) -> SweepReport:
    """Constants, supports, and capacities over a strictly increasing theta grid.

    The support threshold is widened by the inter-atom field ripple of a fully
    supported discrete configuration, so the whole curve is detected at small
    theta as well, where the ripple dominates the constant itself.

    The integral residual compares m over the sweep range against the
    trapezoid integral of 1 / cp(S_tau, plate).
    """
    thetas = [float(t) for t in thetas]
    if len(thetas) < 2 or any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise ValueError("thetas must be strictly increasing")
    if thetas[0] < 0 or thetas[-1] > 1:
        raise ValueError("thetas must lie in [0, 1]")

    cap_full = condenser_capacity(c, m=cap_points, grid_n=grid_n, seed=seed)
    m_e_list, m_f_list, m_hat_list, caps, arcs_list = [], [], [], [], []
    for theta in thetas:
        at_zero = theta <= _ENDPOINT_TOL
        at_one = theta >= 1.0 - _ENDPOINT_TOL
        lam = (DiscreteMeasure.zero() if at_one
               else fekete_green(c, theta, n_points, grid_n, seed))
        if at_zero:
            m_energy = m_field = 0.0
        elif at_one:
            g_inf = green_pole_infinity(c.e_domain, sample_curve(c.gamma, grid_n).points)
            m_energy = m_field = -float(np.max(g_inf))
        else:
            m_energy, m_field = _m_theta_from_lambda(c, lam, theta, grid_n)

        _, vals, mask = gamma_field(c, lam, grid_n)
        field_min = float(np.min(vals[~mask])) if np.any(~mask) else m_field
        # widen the threshold by the inter-atom field ripple: the grid point
        # nearest an atom sits (1-theta)/m * log(1/sin(pi m/grid_n)) above the
        # mid-gap minimum for a fully supported configuration
        ripple = (1.0 - theta) / n_points * np.log(1.0 / np.sin(np.pi * min(0.499, n_points / grid_n)))
        tol = 1e-2 * abs(field_min) + 1e-4 + 1.15 * ripple
        arcs = support_S_theta(c, lam, field_min, tol=tol, grid_n=grid_n)
        if arcs == [(0.0, TWO_PI)]:
            cap_tau = cap_full
        else:
            cap_tau = condenser_capacity(c, m=cap_points, grid_n=grid_n, arcs=arcs, seed=seed)

        m_e_list.append(m_energy)
        m_f_list.append(m_field)
        m_hat_list.append(m_hat_theta(c, lam))
        caps.append(cap_tau)
        arcs_list.append(arcs)

    integrand = np.array([1.0 / cp for cp in caps])
    steps = np.diff(np.array(thetas))
    integral = float(np.sum(0.5 * steps * (integrand[:-1] + integrand[1:])))
    residual = abs(m_f_list[0] - m_f_list[-1] - integral)

    slack = 1e-6
    monotone_m = all(b < a + slack for a, b in zip(m_f_list, m_f_list[1:]))
    monotone_m_hat = all(b > a - slack for a, b in zip(m_hat_list, m_hat_list[1:]))

    return SweepReport(thetas=thetas, m_theta_energy=m_e_list, m_theta_field=m_f_list,
                       m_hat_theta=m_hat_list, cap_condenser=cap_full, cap_s_tau=caps,
                       support_arcs=arcs_list, integral_check_residual=residual,
                       monotone_m=monotone_m, monotone_m_hat=monotone_m_hat)
