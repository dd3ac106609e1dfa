"""Downhill simplex minimization.

Standard coefficients: reflection 1, expansion 2, contraction 0.5 and
shrink 0.5. Iteration stops when the simplex diameter (largest distance
from the best vertex) falls below ``simplex_tolerance`` or after
``max_iters`` iterations.
"""

import logging
import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..exceptions import NonFiniteObjective, ValidationError
from .schemas import NelderMeadConfig, NelderMeadResult

log = logging.getLogger(__name__)

RHO = 1.0
CHI = 2.0
PSI = 0.5
SIGMA = 0.5

Objective = Callable[[np.ndarray], float]
MapFn = Callable[[Objective, Iterable[np.ndarray]], Iterable[float]]


class _CountingObjective:
    def __init__(self, objective: Objective):
        self.objective = objective
        self.calls = 0

    def __call__(self, x: np.ndarray) -> float:
        self.calls += 1
        value = float(self.objective(np.array(x, dtype=np.float64)))
        return value if math.isfinite(value) else math.inf


def _initial_simplex(x0: np.ndarray, steps: Sequence[float]) -> np.ndarray:
    n = len(x0)
    if len(steps) == 1:
        steps = list(steps) * n
    if len(steps) != n:
        raise ValidationError(
            f"initial_step has {len(steps)} entries for a {n}-dimensional problem."
        )
    sim = np.tile(x0, (n + 1, 1))
    for k in range(n):
        sim[k + 1, k] += steps[k]
    return sim


def _minimize_once(
    func: _CountingObjective,
    x0: np.ndarray,
    f0: float,
    steps: Sequence[float],
    cfg: NelderMeadConfig,
    map_fn: MapFn,
    history: list[float],
) -> tuple[np.ndarray, float, int, bool]:
    sim = _initial_simplex(x0, steps)
    fsim = np.empty(len(sim))
    fsim[0] = f0
    fsim[1:] = list(map_fn(func, list(sim[1:])))

    iterations = 0
    converged = False
    while True:
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        diameter = float(np.max(np.linalg.norm(sim[1:] - sim[0], axis=1)))
        if diameter < cfg.simplex_tolerance:
            converged = True
            break
        if iterations >= cfg.max_iters:
            break

        xbar = sim[:-1].mean(axis=0)
        xr = (1 + RHO) * xbar - RHO * sim[-1]
        fr = func(xr)
        shrink = False
        if fr < fsim[0]:
            xe = (1 + RHO * CHI) * xbar - RHO * CHI * sim[-1]
            fe = func(xe)
            if fe < fr:
                sim[-1], fsim[-1] = xe, fe
            else:
                sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-1]:
            xc = (1 + PSI * RHO) * xbar - PSI * RHO * sim[-1]
            fc = func(xc)
            if fc <= fr:
                sim[-1], fsim[-1] = xc, fc
            else:
                shrink = True
        else:
            xcc = (1 - PSI) * xbar + PSI * sim[-1]
            fcc = func(xcc)
            if fcc < fsim[-1]:
                sim[-1], fsim[-1] = xcc, fcc
            else:
                shrink = True

        if shrink:
            sim[1:] = sim[0] + SIGMA * (sim[1:] - sim[0])
            fsim[1:] = list(map_fn(func, list(sim[1:])))

        iterations += 1
        history.append(float(np.min(fsim)))
        if log.isEnabledFor(logging.DEBUG):
            log.debug(f"Nelder-Mead iteration {iterations}: best={history[-1]:.6g}")

    best = int(np.argmin(fsim))
    return sim[best].copy(), float(fsim[best]), iterations, converged


def nelder_mead_minimize(
    objective: Objective,
    x0: ArrayLike,
    cfg: Optional[NelderMeadConfig] = None,
    *,
    map_fn: Optional[MapFn] = None,
) -> NelderMeadResult:
    """Minimize ``objective`` starting from ``x0``.

    Args:
        objective: Scalar function of a 1-D array.
        x0: Start point; the objective must be finite there.
        cfg: Step sizes and stopping rule. ``restarts`` re-runs the method
            from the best point with halved steps.
        map_fn: Evaluates a batch of vertices (initial simplex and shrink
            steps). Defaults to sequential ``map``; any order-preserving map
            (for example ``ThreadPoolExecutor.map``) may be supplied.

    Raises:
        NonFiniteObjective: The objective is not finite at ``x0``.
    """
    cfg = cfg or NelderMeadConfig()
    map_fn = map_fn or map
    func = _CountingObjective(objective)
    x = np.asarray(x0, dtype=np.float64).ravel()

    raw_f0 = float(objective(x.copy()))
    func.calls += 1
    if not math.isfinite(raw_f0):
        raise NonFiniteObjective(f"Objective is {raw_f0} at the start point.")

    history = [raw_f0]
    steps = list(cfg.initial_step)
    best_x, best_f = x, raw_f0
    total_iterations = 0
    converged = False
    for attempt in range(cfg.restarts + 1):
        x_new, f_new, its, converged = _minimize_once(
            func, best_x, best_f, steps, cfg, map_fn, history
        )
        total_iterations += its
        improved = f_new < best_f
        if f_new <= best_f:
            best_x, best_f = x_new, f_new
        if attempt < cfg.restarts and not improved and converged:
            break
        steps = [s * 0.5 for s in steps]

    log.debug(
        "Nelder-Mead finished: f=%.6g after %d iterations, %d evaluations",
        best_f,
        total_iterations,
        func.calls,
    )
    return NelderMeadResult(
        x=tuple(float(v) for v in best_x),
        fun=best_f,
        iterations=total_iterations,
        evaluations=func.calls,
        converged=converged,
        history=history,
    )
