"""Estimation of the extremal norm-ratio constant over polynomial pairs.

Everything runs in the log domain on fixed scan grids: a configuration of
zeros is scored by

    obj = max over plate scan of sum_j log|z - a_j|
        - max over curve scan of sum_j log|z - a_j|,

which is the log of ||pq||_plate / ||pq||_curve and, after dividing by n,
exactly the minimax functional of the combined counting measure on the same
scan sets.  Single-zero moves over a candidate grid are scored in one
vectorized batch, which makes cyclic coordinate descent affordable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .balayage import _alpha_measure
from .errors import BudgetExceeded, GridTooClose
from .equilibrium import fekete_green, leja_weighted
from .geometry import (Condenser, boundary_samples, green_pole_infinity,
                       interior_spots, sample_curve)
from .measure import DiscreteMeasure, LOG_CLAMP, log_potential, minimax_scan_sets

_IMPROVE_EPS = 1e-13


@dataclass(frozen=True)
class ZeroConfig:
    """Zero multiset of a monic polynomial pair (p, q) with degree bounds."""

    p_zeros: tuple
    q_zeros: tuple
    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError("need 0 <= k <= n")
        if len(self.p_zeros) > self.k:
            raise ValueError("too many p zeros for the degree bound k")
        if len(self.q_zeros) > self.n - self.k:
            raise ValueError("too many q zeros for the degree bound n - k")

    def to_json_dict(self):
        return {"n": self.n, "k": self.k,
                "p_zeros": [[z.real, z.imag] for z in map(complex, self.p_zeros)],
                "q_zeros": [[z.real, z.imag] for z in map(complex, self.q_zeros)]}


@dataclass(frozen=True)
class ChiEstimate:
    """Sandwich estimate of the extremal constant at one (n, k)."""

    n: int
    k: int
    chi_upper: float
    chi_lower: float
    log_rate_upper: float  # (1/n) log chi_upper
    log_rate_lower: float
    method: str
    config: ZeroConfig | None = None

    def to_json_dict(self):
        d = {"n": self.n, "k": self.k, "chi_upper": self.chi_upper,
             "chi_lower": self.chi_lower, "log_rate_upper": self.log_rate_upper,
             "log_rate_lower": self.log_rate_lower, "method": self.method}
        if self.config is not None:
            d["config"] = self.config.to_json_dict()
        return d


def _log_abs(diff):
    return np.log(np.maximum(np.abs(diff), LOG_CLAMP))


def ratio_norms(zc: ZeroConfig, c: Condenser, grid_n: int = 4096) -> float:
    """||pq||_plate / ||pq||_curve by log-domain evaluation on the scan grids."""
    return float(np.exp(log_ratio_norms(zc, c, grid_n)))


def log_ratio_norms(zc: ZeroConfig, c: Condenser, grid_n: int = 4096) -> float:
    """log of the norm ratio; stays finite where the ratio itself underflows."""
    zeros = np.array(list(zc.p_zeros) + list(zc.q_zeros), dtype=complex)
    if zeros.size == 0:
        return 0.0
    gamma_pts, e_pts = minimax_scan_sets(c, grid_n, grid_n)
    le = np.sum(_log_abs(e_pts[:, None] - zeros[None, :]), axis=1)
    lg = np.sum(_log_abs(gamma_pts[:, None] - zeros[None, :]), axis=1)
    return float(np.max(le) - np.max(lg))


# ---------------------------------------------------------------------------
# incremental scorer


class NormRatioScorer:
    """Batched incremental evaluation of the log norm-ratio objective.

    Candidate grids: curve samples for q zeros, plate boundary plus interior
    rings (with the exact plate center) for p zeros.  A budget on the number
    of scored configurations guards runaway searches.
    """

    def __init__(self, c: Condenser, grid_n: int = 2048, gamma_cand_n: int = 512,
                 e_cand_n: int = 192, budget: int = 10 ** 9):
        self.condenser = c
        self.gamma_eval, self.e_eval = minimax_scan_sets(c, grid_n, grid_n)
        self.cands = {"gamma": sample_curve(c.gamma, gamma_cand_n).points,
                      "e": _plate_candidates(c, e_cand_n)}
        self.mats = {}
        for kind, pts in self.cands.items():
            self.mats[("e", kind)] = _log_abs(self.e_eval[:, None] - pts[None, :])
            self.mats[("gamma", kind)] = _log_abs(self.gamma_eval[:, None] - pts[None, :])
        self.budget = budget
        self.evals_used = 0

    def _charge(self, n: int):
        self.evals_used += n
        if self.evals_used > self.budget:
            raise BudgetExceeded(
                f"ratio evaluation budget of {self.budget} exhausted")

    def columns(self, z: complex):
        """Log-distance columns of a single zero over both eval sets."""
        return (_log_abs(self.e_eval - z), _log_abs(self.gamma_eval - z))


def _plate_candidates(c: Condenser, n: int) -> np.ndarray:
    e = c.e_domain
    if e.kind != "disk":
        return boundary_samples(e, n)
    n_boundary = max(16, (2 * n) // 3)
    pts = [boundary_samples(e, n_boundary), np.array([e.center], dtype=complex)]
    rings = interior_spots(e, n - n_boundary - 1)
    if rings.size:
        pts.append(rings)
    return np.concatenate(pts)


class _Config:
    """A zero configuration with running log sums over the eval sets.

    fixed zeros never move; movable zeros all share one candidate kind.
    """

    def __init__(self, scorer: NormRatioScorer, fixed_zeros, movable_zeros, kind: str):
        self.scorer = scorer
        self.kind = kind
        self.fixed_le = np.zeros(scorer.e_eval.size)
        self.fixed_lg = np.zeros(scorer.gamma_eval.size)
        for z in fixed_zeros:
            ce, cg = scorer.columns(complex(z))
            self.fixed_le += ce
            self.fixed_lg += cg
        self.zeros = [complex(z) for z in movable_zeros]
        self.cols = [scorer.columns(z) for z in self.zeros]

    def _totals(self):
        le = self.fixed_le.copy()
        lg = self.fixed_lg.copy()
        for ce, cg in self.cols:
            le += ce
            lg += cg
        return le, lg

    def objective(self) -> float:
        self.scorer._charge(1)
        le, lg = self._totals()
        return float(np.max(le) - np.max(lg))

    def move_scores(self, i: int) -> np.ndarray:
        """Objective after moving zero i to each candidate of its kind."""
        me = self.scorer.mats[("e", self.kind)]
        mg = self.scorer.mats[("gamma", self.kind)]
        self.scorer._charge(me.shape[1])
        le, lg = self._totals()
        base_e = le - self.cols[i][0]
        base_g = lg - self.cols[i][1]
        tops_e = np.max(base_e[:, None] + me, axis=0)
        tops_g = np.max(base_g[:, None] + mg, axis=0)
        return tops_e - tops_g

    def drop_score(self, i: int) -> float:
        self.scorer._charge(1)
        le, lg = self._totals()
        return float(np.max(le - self.cols[i][0]) - np.max(lg - self.cols[i][1]))

    def apply_move(self, i: int, cand_idx: int):
        z = complex(self.cands_of_kind()[cand_idx])
        self.zeros[i] = z
        self.cols[i] = (self.scorer.mats[("e", self.kind)][:, cand_idx].copy(),
                        self.scorer.mats[("gamma", self.kind)][:, cand_idx].copy())

    def apply_drop(self, i: int):
        del self.zeros[i]
        del self.cols[i]

    def cands_of_kind(self):
        return self.scorer.cands[self.kind]


def _coordinate_descent(cfg: _Config, sign: float, allow_drop: bool = True,
                        max_sweeps: int = 40):
    """Cyclic single-zero improvement until a clean sweep; returns final objective.

    sign = +1 maximizes, -1 minimizes; every accepted step strictly improves,
    so the loop terminates.
    """
    best = cfg.objective()
    for _ in range(max_sweeps):
        improved = False
        i = 0
        while i < len(cfg.zeros):
            scores = cfg.move_scores(i)
            j = int(np.argmax(sign * scores))
            if sign * scores[j] > sign * best + _IMPROVE_EPS:
                cfg.apply_move(i, j)
                best = float(scores[j])
                improved = True
            if allow_drop and len(cfg.zeros) > 0:
                dropped = cfg.drop_score(i)
                if sign * dropped > sign * best + _IMPROVE_EPS:
                    cfg.apply_drop(i)
                    best = dropped
                    improved = True
                    continue  # indices shifted; do not advance
            i += 1
        if not improved:
            break
    return best


def _greedy_product_points(cands: np.ndarray, m: int) -> list:
    """Unweighted greedy max-product points over a candidate set (Leja style)."""
    if m == 0:
        return []
    chosen = [0]
    acc = _log_abs(cands - cands[0])
    for _ in range(1, m):
        idx = int(np.argmax(acc))
        chosen.append(idx)
        acc = acc + _log_abs(cands - cands[idx])
    return [complex(cands[i]) for i in chosen]


# ---------------------------------------------------------------------------
# chi estimators


def chi_bruteforce(c: Condenser, n: int, k: int, grid_n: int = 2048,
                   restarts: int = 2, seed: int = 0,
                   budget: int = 10 ** 6) -> ChiEstimate:
    """Nested minimax search at small n: outer inf over p zeros, inner sup
    over q zeros, both by multistart cyclic coordinate descent on candidate
    grids, with lower degrees explored through zero-dropping moves.

    k = 0 is exact: the constant polynomial is the inner maximizer (the
    maximum principle caps the ratio at 1), so chi = 1.
    """
    if n > 6:
        raise ValueError("chi_bruteforce is restricted to n <= 6")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if k == 0:
        return ChiEstimate(n=n, k=k, chi_upper=1.0, chi_lower=1.0,
                           log_rate_upper=0.0, log_rate_lower=0.0,
                           method="bruteforce",
                           config=ZeroConfig((), (), n, k))

    scorer = NormRatioScorer(c, grid_n=min(grid_n, 2048), gamma_cand_n=256,
                             e_cand_n=160, budget=budget)
    rng = np.random.default_rng(seed)
    e_cands = scorer.cands["e"]
    g_cands = scorer.cands["gamma"]

    p_starts = [_greedy_product_points(boundary_samples(c.e_domain, 128), k)]
    if c.e_domain.kind == "disk":
        p_starts.append([complex(c.e_domain.center)] * k)
    else:
        p_starts.append([complex(0.5 * (c.e_domain.a + c.e_domain.b))] * k)
    for _ in range(max(0, restarts)):
        p_starts.append([complex(e_cands[i]) for i in rng.integers(0, len(e_cands), size=k)])

    def inner_sup(p_zeros, warm=None, sweeps=40, with_random=False):
        """sup over q of the objective at fixed p; multistart + empty config."""
        starts = [_greedy_product_points(g_cands, n - k)]
        if with_random and n - k > 0:
            starts.append([complex(g_cands[i])
                           for i in rng.integers(0, len(g_cands), size=n - k)])
        if warm is not None:
            starts.insert(0, list(warm))
        best_val, best_q = None, []
        for q0 in starts:
            cfg = _Config(scorer, p_zeros, q0, "gamma")
            val = _coordinate_descent(cfg, +1.0, allow_drop=True, max_sweeps=sweeps)
            if best_val is None or val > best_val:
                best_val, best_q = val, list(cfg.zeros)
        empty = _Config(scorer, p_zeros, [], "gamma").objective()
        if empty > best_val:
            best_val, best_q = empty, []
        return best_val, best_q

    best = None  # (value, p_zeros, q_zeros)
    for p0 in p_starts:
        val, q_star = inner_sup(p0, with_random=True)
        p_cur = list(p0)
        for _ in range(6):  # outer sweeps
            improved = False
            i = 0
            while i < len(p_cur):
                proxy_cfg = _Config(scorer, q_star, p_cur, "e")
                scores = proxy_cfg.move_scores(i)
                order = np.argsort(scores, kind="stable")[:4]  # most promising moves
                for j in order:
                    if scores[j] >= val - _IMPROVE_EPS:
                        break
                    trial = list(p_cur)
                    trial[i] = complex(e_cands[j])
                    tv, tq = inner_sup(trial, warm=q_star, sweeps=6)
                    if tv < val - _IMPROVE_EPS:
                        p_cur, val, q_star = trial, tv, tq
                        improved = True
                        break
                # degree reduction on p
                if len(p_cur) > 0:
                    trial = p_cur[:i] + p_cur[i + 1:]
                    tv, tq = inner_sup(trial, warm=q_star, sweeps=6)
                    if tv < val - _IMPROVE_EPS:
                        p_cur, val, q_star = trial, tv, tq
                        improved = True
                        continue
                i += 1
            if not improved:
                break
        if best is None or val < best[0]:
            best = (val, list(p_cur), list(q_star))

    log_upper, p_best, q_best = best
    low_cfg = _Config(scorer, q_best, list(p_best), "e")
    log_lower = _coordinate_descent(low_cfg, -1.0, allow_drop=True)
    return _estimate(n, k, log_upper, log_lower, "bruteforce",
                     ZeroConfig(tuple(p_best), tuple(q_best), n, k))


def chi_asymptotic_pair(c: Condenser, n: int, k: int, grid_n: int = 2048,
                        seed: int = 0, budget: int = 10 ** 8) -> ChiEstimate:
    """Sandwich from the equilibrium discretizations: p from the plate Leja
    points, q from the curve Fekete points, polished by coordinate descent.

    chi_upper is the inner sup over q at the better of the two p configs;
    chi_lower descends p at the fixed Fekete q.  Both descents start from the
    shared pair, which forces chi_lower <= chi_upper.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    theta = k / n
    fek_grid = max(4096, 16 * max(1, n - k))
    if k == n:
        lam = DiscreteMeasure.zero()
        q0 = []
    elif n - k == 1:
        # single-point stage: the weighted functional reduces to the field term
        samples = sample_curve(c.gamma, fek_grid)
        g_inf = green_pole_infinity(c.e_domain, samples.points)
        z = complex(samples.points[int(np.argmax(g_inf))])
        lam = DiscreteMeasure([z], [(1.0 - theta)])
        q0 = [z]
    else:
        lam = fekete_green(c, theta, n - k, fek_grid, seed)
        q0 = [complex(z) for z in lam.points]
    if k == 0:
        p0 = []
    else:
        leja_grid = max(4096, 16 * k)
        mu = leja_weighted(c, lam, theta, k, leja_grid)
        p0 = [complex(z) for z in mu.points]

    scorer = NormRatioScorer(c, grid_n=grid_n, gamma_cand_n=min(1024, grid_n),
                             e_cand_n=256, budget=budget)

    up_cfg = _Config(scorer, p0, q0, "gamma")
    log_upper = _coordinate_descent(up_cfg, +1.0, allow_drop=True)
    empty_val = _Config(scorer, p0, [], "gamma").objective()
    log_upper = max(log_upper, empty_val)
    q_star = list(up_cfg.zeros) if log_upper > empty_val - _IMPROVE_EPS else []

    # the inf side descends from the Leja start and from the all-at-center
    # start (the config whose swept counting measure is the plate equilibrium
    # distribution); single-zero moves cannot cross between the two basins
    p_starts = [list(p0)]
    if k > 0:
        if c.e_domain.kind == "disk":
            p_starts.append([complex(c.e_domain.center)] * k)
        else:
            p_starts.append([complex(0.5 * (c.e_domain.a + c.e_domain.b))] * k)
    log_lower, p_star = None, list(p0)
    for ps in p_starts:
        low_cfg = _Config(scorer, q0, list(ps), "e")
        val = _coordinate_descent(low_cfg, -1.0, allow_drop=True)
        if log_lower is None or val < log_lower:
            log_lower, p_star = val, list(low_cfg.zeros)

    if p_star != p0:
        # re-run the sup at the improved p, again from the Fekete start so the
        # sandwich ordering is preserved by construction
        polish = _Config(scorer, p_star, list(q0), "gamma")
        polished = _coordinate_descent(polish, +1.0, allow_drop=True)
        polished = max(polished, _Config(scorer, p_star, [], "gamma").objective())
        if polished < log_upper:
            log_upper = polished
            q_star = list(polish.zeros)

    return _estimate(n, k, log_upper, log_lower, "asymptotic_pair",
                     ZeroConfig(tuple(p_star), tuple(q_star), n, k))


def _estimate(n, k, log_upper, log_lower, method, config) -> ChiEstimate:
    return ChiEstimate(n=n, k=k,
                       chi_upper=float(np.exp(log_upper)),
                       chi_lower=float(np.exp(log_lower)),
                       log_rate_upper=log_upper / n,
                       log_rate_lower=log_lower / n,
                       method=method, config=config)


# ---------------------------------------------------------------------------
# zero distribution diagnostics


def zero_distribution_diag(zc: ZeroConfig, c: Condenser, reference: DiscreteMeasure,
                           test_grid, boundary_grid_n: int = 4096) -> float:
    """Weak-star proxy: max over the test grid of |U^{alpha(p)} - U^{reference}|.

    The test grid must keep distance >= 0.05 from both supports.
    """
    pts = np.asarray(test_grid, dtype=complex)
    alpha = _alpha_measure(np.asarray(zc.p_zeros, dtype=complex), c, zc.n, boundary_grid_n)
    for supp in (alpha.points, reference.points):
        if supp.size and pts.size:
            d = np.min(np.abs(pts[:, None] - supp[None, :]), axis=1)
            if np.min(d) < 0.05:
                raise GridTooClose("test grid comes within 0.05 of a measure support")
    ua = np.atleast_1d(log_potential(alpha, pts))
    ur = np.atleast_1d(log_potential(reference, pts))
    return float(np.max(np.abs(ua - ur)))
