"""Maximize the achievable secrecy rate over the coding parameters.

The objective min(r_tilde, r_hat) is nonsmooth (a min of two clamps) and
low-dimensional (c, alpha1, alpha2, p; five real dims when c is complex), so
the search is a dense vectorized coarse grid followed by multistart
Nelder-Mead refinement from the best grid points.  The power constraint
|c|^2 p2 + p <= p1 is handled by clipping p into its per-c budget and
penalizing points whose budget has vanished.

Everything is deterministic: the grid is a pure function of the
configuration, ties are broken toward the lexicographically smallest
(Re c, Im c, alpha1, alpha2, p), and the Monte-Carlo variant draws its
phase realizations once per call from an explicit seed (common random
numbers across all candidate points).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError
from .rate_core import (
    ChannelGains,
    CodingParams,
    RateBreakdown,
    SystemParams,
    _min_rate,
    rates,
)

log = logging.getLogger(__name__)



@dataclass
class OptConfig:
    """Search-effort knobs.

    grid_steps gives the coarse-grid point counts per dimension
    (c, alpha1, alpha2, p); an int applies to the first three with a smaller
    default for p.  Even counts are rounded up to odd so the grids include 0.
    """

    grid_steps: int | tuple[int, int, int, int] = (13, 13, 13, 7)
    refine_iters: int = 400
    multistarts: int = 8
    tol: float = 1e-9
    p_floor: float = 1e-6
    complex_c: bool = False

    def __post_init__(self):
        if isinstance(self.grid_steps, int):
            self.grid_steps = (self.grid_steps, self.grid_steps, self.grid_steps,
                               max(3, (self.grid_steps + 1) // 2))
        self.grid_steps = tuple(int(n) for n in self.grid_steps)
        if len(self.grid_steps) != 4 or any(n < 3 for n in self.grid_steps):
            raise DomainError(f"grid_steps needs four entries >= 3, got {self.grid_steps}")
        if self.multistarts < 1:
            raise DomainError(f"multistarts must be >= 1, got {self.multistarts}")
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if not 0 < self.p_floor:
            raise DomainError(f"p_floor must be positive, got {self.p_floor}")


@dataclass
class OptResult:
    """Best operating point found plus its full rate breakdown.

    `objective` is what the search maximized: r_s itself in the
    deterministic mode (equal to breakdown.r_s), or the Monte-Carlo mean of
    min(r_tilde, r_hat) in the expected mode, where `objective_se` carries
    its standard error and `breakdown` is the deterministic evaluation at
    the reference draw (unknown phases zero).
    """

    best: CodingParams | None
    breakdown: RateBreakdown | None
    evaluations: int
    status: str  # converged | grid-only | infeasible
    objective: float
    objective_se: float = 0.0


def _odd(n: int) -> int:
    return n if n % 2 == 1 else n + 1


def _alpha_grid(n: int, bound: float) -> np.ndarray:
    """Signed log-spaced grid including 0 (n rounded to odd).

    The precoding coefficients trade state-cancellation (optimum near 1)
    against the rate cost of the binning overhead, and both sides of that
    trade scale together with the link gains, so the useful magnitudes stay
    order-one no matter how strong the links are.  The grid therefore covers
    [0.25, 4] log-uniformly (clipped to `bound`) and leaves anything beyond
    to the local refinement stage, which searches unbounded.
    """
    half = (_odd(n) - 1) // 2
    if half == 1:
        mags = np.array([min(1.0, bound)])
    else:
        mags = np.geomspace(0.25, min(bound, 4.0), half)
    return np.concatenate([-mags[::-1], [0.0], mags])


def _gain_arrays(gains: ChannelGains):
    return (
        np.asarray(gains.h_sr, dtype=np.complex128),
        np.asarray(gains.h_sd, dtype=np.complex128),
        np.asarray(gains.h_rd, dtype=np.complex128),
        np.asarray(gains.h_se, dtype=np.complex128),
        np.asarray(gains.h_re, dtype=np.complex128),
    )


def _alpha_scale(gains: ChannelGains) -> float:
    # only the destination/eavesdropper links multiply the precoding
    # coefficients anywhere in the rate expressions; the relay link h_sr
    # sets the decoding bound alone and must not inflate this scale
    return max(float(np.max(np.abs(np.asarray(h)))) for h in
               (gains.h_sd, gains.h_rd, gains.h_se, gains.h_re))


class _Problem:
    """Shared machinery for the deterministic and Monte-Carlo objectives."""

    def __init__(self, gains: ChannelGains, sys: SystemParams, cfg: OptConfig,
                 draws: ChannelGains | None = None):
        self.sys = sys
        self.cfg = cfg
        self.hs = _gain_arrays(draws if draws is not None else gains)
        self.n_draws = int(np.size(self.hs[3])) if draws is not None else 0
        self.alpha_bound = 3.0 * (1.0 + _alpha_scale(draws if draws is not None else gains))
        self.evaluations = 0

    # -- feasibility geometry ------------------------------------------------
    def c_budget(self, c_sq: float) -> float:
        return self.sys.p1 - c_sq * self.sys.p2

    def value_many(self, c, a1, a2, p) -> np.ndarray:
        """Objective on flat candidate arrays; averages over draws in MC mode."""
        self.evaluations += int(np.size(c))
        hsr, hsd, hrd, hse, hre = self.hs
        if self.n_draws:
            c = np.asarray(c)[:, None]
            a1 = np.asarray(a1)[:, None]
            a2 = np.asarray(a2)[:, None]
            p = np.asarray(p)[:, None]
            vals = _min_rate(c, a1, a2, p, hsr, hsd, hrd, hse, hre, self.sys.p2, self.sys.q)
            return vals.mean(axis=-1)
        return _min_rate(c, a1, a2, p, hsr, hsd, hrd, hse, hre, self.sys.p2, self.sys.q)

    def value_one(self, c, a1: float, a2: float, p: float) -> float:
        cdtype = np.complex128 if self.cfg.complex_c else np.float64
        out = self.value_many(
            np.full(1, c, dtype=cdtype),
            np.full(1, float(a1)),
            np.full(1, float(a2)),
            np.full(1, float(p)),
        )
        return float(out[0])

    def draw_values(self, c: complex, a1: float, a2: float, p: float) -> np.ndarray:
        """Per-draw objective samples at one point (MC mode only)."""
        hsr, hsd, hrd, hse, hre = self.hs
        return np.atleast_1d(_min_rate(
            np.complex128(complex(c)), np.float64(a1), np.float64(a2), np.float64(p),
            hsr, hsd, hrd, hse, hre, self.sys.p2, self.sys.q,
        ))


def _build_grid(problem: _Problem) -> tuple[np.ndarray, ...] | None:
    """Flat feasible candidate arrays (c, a1, a2, p), or None when nothing fits."""
    sys, cfg = problem.sys, problem.cfg
    n_c, n_a1, n_a2, n_p = cfg.grid_steps
    head = sys.p1 - cfg.p_floor
    if head <= 0:
        return None
    c_max = math.sqrt(head / sys.p2)

    if cfg.complex_c:
        axis = np.linspace(-c_max, c_max, _odd(n_c))
        re, im = np.meshgrid(axis, axis, indexing="ij")
        c_axis = (re + 1j * im).ravel()
        c_axis = c_axis[np.abs(c_axis) ** 2 <= c_max**2]  # keep the feasible disk
        c_axis = c_axis.astype(np.complex128)
    else:
        c_axis = np.linspace(-c_max, c_max, _odd(n_c))

    a_axis = _alpha_grid(n_a1, problem.alpha_bound)
    a2_axis = _alpha_grid(n_a2, problem.alpha_bound)
    f_axis = np.linspace(0.0, 1.0, n_p)

    cg, a1g, a2g, fg = np.meshgrid(c_axis, a_axis, a2_axis, f_axis, indexing="ij")
    cg, a1g, a2g, fg = cg.ravel(), a1g.ravel(), a2g.ravel(), fg.ravel()
    budget = sys.p1 - np.abs(cg) ** 2 * sys.p2
    pg = cfg.p_floor + fg * (budget - cfg.p_floor)
    ok = budget >= cfg.p_floor
    if not ok.any():
        return None
    return cg[ok], a1g[ok], a2g[ok], pg[ok]


def _eval_grid(problem: _Problem, grid) -> np.ndarray:
    cg, a1g, a2g, pg = grid
    if not problem.n_draws:
        return problem.value_many(cg, a1g, a2g, pg)
    # chunk so the (points x draws) broadcast stays within a few tens of MB
    chunk = max(1, 1_000_000 // max(problem.n_draws, 1))
    out = np.empty(cg.size)
    for lo in range(0, cg.size, chunk):
        hi = min(lo + chunk, cg.size)
        out[lo:hi] = problem.value_many(cg[lo:hi], a1g[lo:hi], a2g[lo:hi], pg[lo:hi])
    return out


def _param_key(c: complex, a1: float, a2: float, p: float) -> tuple:
    return (float(np.real(c)), float(np.imag(c)), float(a1), float(a2), float(p))


def _argbest(values: np.ndarray, grid) -> int:
    """Index of the max value; ties go to the lexicographically smallest params."""
    top = float(values.max())
    tied = np.flatnonzero(values == top)
    if tied.size == 1:
        return int(tied[0])
    cg, a1g, a2g, pg = grid
    keys = [(_param_key(cg[i], a1g[i], a2g[i], pg[i]), int(i)) for i in tied]
    return min(keys)[1]


def _project(problem: _Problem, x: np.ndarray):
    """Decode a refinement vector into feasible (c, a1, a2, p), or None."""
    cfg, sys = problem.cfg, problem.sys
    if cfg.complex_c:
        c = complex(x[0], x[1])
        a1, a2, p_raw = float(x[2]), float(x[3]), float(x[4])
    else:
        c = float(x[0])
        a1, a2, p_raw = float(x[1]), float(x[2]), float(x[3])
    budget = problem.c_budget(abs(c) ** 2)
    if budget < cfg.p_floor:
        return None
    p = min(max(p_raw, cfg.p_floor), budget)
    return c, a1, a2, p


def _refine(problem: _Problem, starts) -> tuple[list, bool]:
    """Nelder-Mead polish from each start; returns candidates and a convergence flag."""
    cfg = problem.cfg
    candidates = []
    any_converged = False

    def negated(x: np.ndarray) -> float:
        point = _project(problem, x)
        if point is None:
            return math.inf
        return -problem.value_one(*point)

    for c0, a10, a20, p0 in starts:
        if cfg.complex_c:
            x0 = np.array([np.real(c0), np.imag(c0), a10, a20, p0])
        else:
            x0 = np.array([np.real(c0), a10, a20, p0])
        res = minimize(
            negated, x0, method="Nelder-Mead",
            options={"maxiter": cfg.refine_iters, "xatol": 1e-10, "fatol": cfg.tol,
                     "disp": False},
        )
        point = _project(problem, res.x)
        if point is None:
            continue
        value = problem.value_one(*point)
        candidates.append((value, _param_key(*point), point))
        any_converged = any_converged or bool(res.success)
    return candidates, any_converged


def _finish(problem: _Problem, gains_for_breakdown: ChannelGains | None,
            winner, objective: float, status: str, se: float) -> OptResult:
    c, a1, a2, p = winner
    best = CodingParams(c=c, alpha1=a1, alpha2=a2, p=p)
    breakdown = None
    if gains_for_breakdown is not None:
        breakdown = rates(gains_for_breakdown, problem.sys, best)
    return OptResult(
        best=best, breakdown=breakdown, evaluations=problem.evaluations,
        status=status, objective=objective, objective_se=se,
    )


def _search(problem: _Problem) -> tuple | None:
    """Grid plus refinement; returns (winner_params, objective, status) or None."""
    cfg = problem.cfg
    grid = _build_grid(problem)
    if grid is None:
        return None
    values = _eval_grid(problem, grid)
    best_i = _argbest(values, grid)
    cg, a1g, a2g, pg = grid
    grid_best = (complex(cg[best_i]) if cfg.complex_c else float(np.real(cg[best_i])),
                 float(a1g[best_i]), float(a2g[best_i]), float(pg[best_i]))
    grid_value = float(values[best_i])

    # warn only when the grid edge strictly beats every interior point; flat
    # plateaus (e.g. q = 0, where alpha is irrelevant) tie onto the edge
    a1_edge = float(np.abs(a1g).max())
    a2_edge = float(np.abs(a2g).max())
    on_edge = abs(grid_best[1]) >= a1_edge or abs(grid_best[2]) >= a2_edge
    if on_edge and grid_value > 0.0:
        interior = (np.abs(a1g) < a1_edge) & (np.abs(a2g) < a2_edge)
        if not interior.any() or float(values[interior].max()) < grid_value:
            log.warning(
                "alpha grid maximum sits on the grid edge (+-%g); relying on "
                "the local refinement to search beyond it", max(a1_edge, a2_edge),
            )

    # multistart seeds: the K best distinct grid points, stable order
    order = np.argsort(-values, kind="stable")[: cfg.multistarts]
    starts = [
        (complex(cg[i]) if cfg.complex_c else float(np.real(cg[i])),
         float(a1g[i]), float(a2g[i]), float(pg[i]))
        for i in order
    ]
    refined, converged = _refine(problem, starts)

    candidates = [(grid_value, _param_key(*grid_best), grid_best)] + refined
    winner_value = max(v for v, _, _ in candidates)
    winner = min((key, point) for v, key, point in candidates if v == winner_value)[1]
    status = "converged" if converged else "grid-only"
    return winner, winner_value, status


def optimize(gains: ChannelGains, sys: SystemParams, cfg: OptConfig | None = None) -> OptResult:
    """Maximize min(r_tilde, r_hat) over (c, alpha1, alpha2, p).

    Parameters
    ----------
    gains : ChannelGains
        Scalar link coefficients (complex allowed).
    sys : SystemParams
        Powers and state variance; the feasible set is
        |c|^2 p2 + p <= p1 with p >= cfg.p_floor.
    cfg : OptConfig, optional
        Search-effort knobs; defaults are sized for sub-second solves.

    Returns
    -------
    OptResult
        Deterministic for fixed inputs; `objective` equals `breakdown.r_s`
        and dominates every coarse-grid point evaluated.
    """
    cfg = cfg or OptConfig()
    for h in (gains.h_sr, gains.h_sd, gains.h_rd, gains.h_se, gains.h_re):
        if np.size(h) != 1:
            raise DomainError("optimize needs scalar gains; use optimize_expected for draws")
    problem = _Problem(gains, sys, cfg)
    found = _search(problem)
    if found is None:
        return OptResult(best=None, breakdown=None, evaluations=problem.evaluations,
                         status="infeasible", objective=float("nan"))
    winner, value, status = found
    result = _finish(problem, gains, winner, value, status, 0.0)
    return result


def optimize_expected(sampler, sys: SystemParams, cfg: OptConfig | None = None,
                      mc_draws: int = 2000, seed=0) -> OptResult:
    """Maximize the Monte-Carlo mean of min(r_tilde, r_hat) over unknown phases.

    `sampler(rng, n)` must return a ChannelGains whose eavesdropper links are
    length-n arrays (see topology.FadingSampler); the n = mc_draws phase
    realizations are drawn once up front from `seed` and shared by every
    candidate point, so the surface being optimized is deterministic.
    The returned breakdown is evaluated at `sampler.reference_gains` (unknown
    phases pinned to zero); the Monte-Carlo mean and its standard error live
    in `objective` / `objective_se`.
    """
    cfg = cfg or OptConfig()
    if mc_draws < 1:
        raise DomainError(f"mc_draws must be >= 1, got {mc_draws}")
    rng = np.random.default_rng(seed)
    draws = sampler(rng, mc_draws)
    problem = _Problem(draws, sys, cfg, draws=draws)
    found = _search(problem)
    if found is None:
        return OptResult(best=None, breakdown=None, evaluations=problem.evaluations,
                         status="infeasible", objective=float("nan"))
    winner, value, status = found
    samples = problem.draw_values(*winner)
    se = float(samples.std(ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
    reference = getattr(sampler, "reference_gains", None)
    return _finish(problem, reference, winner, value, status, se)
