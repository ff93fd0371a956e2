"""Vanishing-discount sweep: solve along a decreasing discount schedule and
collect the diagnostics that certify convergence of ``v^alpha``."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, check_same_grid, lipschitz_x
from .kernel import KernelModel, theta_values
from .model import HJBModel, IndexSets, uniqueness_sets
from .solver import SolveReport, SolverError, ergodic_residual, solve_discounted
from .scheme import make_params

log = logging.getLogger(__name__)

METRIC_COLUMNS = ("alpha", "sup_alpha_v", "sup_on_Z", "lip_x", "sup_theta",
                  "cauchy_increment", "xi_modulus")


@dataclass(frozen=True)
class Metrics:
    alpha: float
    sup_alpha_v: float
    sup_on_Z: float
    lip_x: float
    sup_theta: float
    cauchy_increment: float
    xi_modulus: float

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in METRIC_COLUMNS}
        if math.isinf(self.cauchy_increment):
            out["cauchy_increment"] = None
        return out


@dataclass
class SweepOptions:
    tol: float = 1e-9
    c_tol: float = 1e-3
    warm_start: bool = True
    extrapolate: bool = False
    method: str = "newton"
    scheme: str = "godunov"
    tol_zero: float = 0.0
    fit_points: int = 5


@dataclass
class SweepReport:
    schedule: list
    per_alpha: list
    limit_field: Field = field(repr=False)
    ergodic_c: float
    ergodic_c_fit: float
    ergodic_residual: float
    x0_index: int | None
    x0_balance: list
    solves: list = field(default_factory=list, repr=False)
    fields: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "schedule": list(self.schedule),
            "per_alpha": [m.as_dict() for m in self.per_alpha],
            "ergodic_c": self.ergodic_c,
            "ergodic_c_fit": self.ergodic_c_fit,
            "ergodic_residual": self.ergodic_residual,
            "x0_index": self.x0_index,
            "x0_balance": list(self.x0_balance),
            "solves": [s.to_dict() for s in self.solves],
        }


def coupling_constants(model: HJBModel, kernel: KernelModel) -> tuple[float, float]:
    """Constants ``(M1, M2)`` of the coupling bound ``|Theta v| <= M1 + M2 * Lip(v)``.

    ``M1 = M + sup|H(x, 0, xi)| = 2 sup f`` (here ``H(x, 0, xi) = -f``) and
    ``M2 = k1``.
    """
    return 2 * model.sup_f, kernel.k1


def metrics_for(v: Field, alpha: float, prev: Field | None, sets: IndexSets,
                kernel: KernelModel) -> Metrics:
    vals = v.values
    if prev is not None:
        check_same_grid(v, prev)
        cauchy = float(np.max(np.abs(vals - prev.values)))
    else:
        cauchy = math.inf
    if sets.Z_nodes:
        i, j = np.array(sets.Z_nodes).T
        on_Z = float(np.max(np.abs(vals[i, j])))
    else:
        on_Z = 0.0
    return Metrics(
        alpha=float(alpha),
        sup_alpha_v=float(alpha * np.max(np.abs(vals))),
        sup_on_Z=on_Z,
        lip_x=lipschitz_x(v),
        sup_theta=float(np.max(np.abs(theta_values(kernel, vals)))),
        cauchy_increment=cauchy,
        xi_modulus=float(np.max(np.abs(np.diff(vals, axis=1)))),
    )


def check_schedule(schedule) -> list:
    alphas = [float(a) for a in schedule]
    if not alphas or any(a <= 0 for a in alphas):
        raise ValueError("schedule must be nonempty with positive entries")
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("schedule must be strictly decreasing")
    return alphas


def default_schedule(alpha0: float = 1.0, ratio: float = 0.5, count: int = 15) -> list:
    return [alpha0 * ratio ** k for k in range(count)]


def fit_ergodic_constant(alphas, signed) -> float:
    """Intercept of the linear fit of ``max(alpha v)`` against alpha, negated."""
    if len(alphas) < 2:
        return -float(signed[-1])
    slope, intercept = np.polyfit(np.asarray(alphas), np.asarray(signed), 1)
    return -float(intercept)


def run_sweep(model: HJBModel, kernel: KernelModel, schedule=None,
              opts: SweepOptions | None = None) -> SweepReport:
    """Solve along `schedule` (strictly decreasing) and collect per-alpha metrics.

    Each solve is warm-started from the previous one unless
    ``opts.warm_start`` is False. The limit field is the last solution, or a
    linear extrapolation in alpha of the last two when ``opts.extrapolate``.
    """
    opts = opts or SweepOptions()
    alphas = check_schedule(default_schedule() if schedule is None else schedule)
    sets = uniqueness_sets(model, opts.tol_zero)
    x0 = sets.A_nodes[0] if sets.A_nodes else None
    v = Field.zeros(model.grid)
    prev = None
    per_alpha, solves, fields, balance, signed = [], [], [], [], []
    for alpha in alphas:
        init = v if (opts.warm_start and prev is not None) else "zero"
        try:
            v, rep = solve_discounted(model, kernel, alpha, init=init, tol=opts.tol,
                                      method=opts.method, scheme=opts.scheme)
        except SolverError as exc:
            raise SolverError(f"sweep failed at alpha={alpha}: {exc}",
                              residual=exc.residual, alpha=alpha) from exc
        per_alpha.append(metrics_for(v, alpha, prev, sets, kernel))
        solves.append(rep)
        fields.append(v)
        signed.append(float(alpha * np.max(v.values)))
        if x0 is not None:
            row = alpha * v.values[x0] + theta_values(kernel, v.values[x0])
            balance.append(float(np.max(np.abs(row))))
        log.info("alpha=%.6g iterations=%d residual=%.3e", alpha, rep.iterations,
                 rep.final_residual)
        prev = v

    limit = v
    if opts.extrapolate and len(fields) >= 2:
        a1, a2 = alphas[-2], alphas[-1]
        w = a2 / (a1 - a2)
        limit = Field(model.grid, fields[-1].values + w * (fields[-1].values - fields[-2].values))
    k = min(opts.fit_points, len(alphas))
    c_fit = fit_ergodic_constant(alphas[-k:], signed[-k:])
    c = 0.0 if per_alpha[-1].sup_alpha_v < opts.c_tol else c_fit
    params = make_params(model, kernel, 0.0, scheme=opts.scheme)
    res = ergodic_residual(model, kernel, limit, c, params)
    return SweepReport(alphas, per_alpha, limit, c, c_fit, res, x0, balance, solves, fields)
