"""First-order solvers: adaptive mirror descent and the market baselines.

The adaptive method ("adamir") is mirror descent whose step-size is the
inverse square root of accumulated squared Bregman residuals:

    gamma_t = 1 / sqrt(sum_{s<t} rho_s^2),
    rho_s^2 = [D(X_s, X_{s+1}) + D(X_{s+1}, X_s)] / gamma_s^2,

seeded by a prestart residual rho_0^2 = D(X_0, X_1) + D(X_1, X_0) from two
distinct initial points.  The residual is a gradient-mapping proxy measured
in the prox geometry itself, which is what lets the step stabilize to a
positive limit on relatively smooth problems instead of vanishing.

Baselines: mirror descent with a fixed step (equals entropic gradient
descent on simplex products), a 1/sqrt(t)-decayed variant, and proportional
response for Fisher markets (algebraically EGD with unit step).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import Trace, TraceRecord
from .errors import DegenerateInit, DomainViolation, SolverAbort, StepTooLarge

KIND_ADAMIR = "adamir"
KIND_EGD = "egd"
KIND_PR = "pr"
KIND_DECAY = "md-decay"

_DEGENERATE_TOL = 1e-14


@dataclass
class SolverSpec:
    """Which solver to run and for how long.

    ``gamma`` is the fixed step for ``egd`` and the base step gamma0 of the
    1/sqrt(t) schedule for ``md-decay``; unused otherwise.
    """

    kind: str
    horizon: int
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in (KIND_ADAMIR, KIND_EGD, KIND_PR, KIND_DECAY):
            raise ValueError(f"unknown solver kind {self.kind!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.kind in (KIND_EGD, KIND_DECAY):
            if self.gamma is None or self.gamma <= 0:
                raise ValueError(f"{self.kind} needs a positive step parameter")

    @property
    def label(self):
        if self.kind in (KIND_EGD, KIND_DECAY):
            return f"{self.kind}-{self.gamma:g}"
        return self.kind

    @staticmethod
    def parse(text, horizon):
        """Parse shorthand ``adamir | pr | egd:<gamma> | md-decay:<gamma0>``."""
        name, _, param = text.strip().partition(":")
        if name in (KIND_ADAMIR, KIND_PR):
            if param:
                raise ValueError(f"solver {name!r} takes no parameter")
            return SolverSpec(name, horizon)
        if name in (KIND_EGD, KIND_DECAY):
            if not param:
                raise ValueError(f"solver {name!r} needs a step, e.g. {name}:0.1")
            return SolverSpec(name, horizon, gamma=float(param))
        raise ValueError(f"unknown solver {text!r}")


# ---------------------------------------------------------------------------
# Adaptive mirror descent
# ---------------------------------------------------------------------------

@dataclass
class AdaMirState:
    """Mutable per-run state of the adaptive method."""

    x_prev: np.ndarray
    x_curr: np.ndarray
    residual_sq_sum: float   # rho_0^2 + sum of rho_s^2 for s < t
    rho0_sq: float
    t: int
    avg_sum: np.ndarray      # running sum of X_1..X_t
    avg_count: int
    last_gamma: float = field(default=float("nan"))
    last_rho_sq: float = field(default=float("nan"))

    @property
    def gamma(self):
        """Step that the next update will use."""
        return 1.0 / np.sqrt(self.residual_sq_sum)

    @property
    def average(self):
        return self.avg_sum / self.avg_count


def adamir_init(geom, x0, x1):
    """Start the adaptive method from two distinct in-domain points."""
    x0 = np.asarray(x0, dtype=float).reshape(geom.dimension)
    x1 = np.asarray(x1, dtype=float).reshape(geom.dimension)
    rho0_sq = geom.symmetric_divergence(x0, x1)
    if rho0_sq <= _DEGENERATE_TOL:
        raise DegenerateInit("initial points coincide; the prestart residual is zero")
    return AdaMirState(
        x_prev=x0.copy(), x_curr=x1.copy(),
        residual_sq_sum=rho0_sq, rho0_sq=rho0_sq,
        t=1, avg_sum=x1.copy(), avg_count=1,
    )


def adamir_step(state, geom, oracle):
    """Advance one iteration in place; returns the state.

    Queries the oracle at (x_curr, t), takes the prox step with the current
    gamma, then folds the new squared residual into the accumulator.  The
    step used and the residual produced are kept on the state for telemetry.
    """
    gamma = state.gamma
    g = oracle.query(state.x_curr, state.t)
    x_next = geom.prox(state.x_curr, -gamma * g)
    rho_sq = geom.symmetric_divergence(state.x_curr, x_next) / gamma ** 2
    state.x_prev = state.x_curr
    state.x_curr = x_next
    state.residual_sq_sum += rho_sq
    state.t += 1
    state.avg_sum = state.avg_sum + x_next
    state.avg_count += 1
    state.last_gamma = gamma
    state.last_rho_sq = rho_sq
    return state


# ---------------------------------------------------------------------------
# Fisher market baselines
# ---------------------------------------------------------------------------

def _market_bids(mkt, b):
    b = np.asarray(b, dtype=float)
    shape = b.shape
    b = b.reshape(mkt.n, mkt.m)
    if np.any(b < 0.0):
        raise DomainViolation("bids must be nonnegative")
    return b, shape


def egd_step(mkt, b, gamma):
    """Entropic gradient step b'_ij proportional to b_ij (u_ij / p_j)^gamma.

    Identical to the entropic prox of -gamma * grad Phi (the constant 1 in
    the gradient cancels in the per-row normalization).
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    b, shape = _market_bids(mkt, b)
    p = b.sum(axis=0)
    if np.any(p <= 0.0):
        raise DomainViolation("all prices must be positive")
    w = b * (mkt.u / p[None, :]) ** gamma
    w /= w.sum(axis=1, keepdims=True)
    return w.reshape(shape)


def pr_step(mkt, b):
    """Proportional response: b'_ij = u_ij w_ij / sum_k u_ik w_ik, w = b/p."""
    b, shape = _market_bids(mkt, b)
    p = b.sum(axis=0)
    if np.any(p <= 0.0):
        raise DomainViolation("all prices must be positive")
    spend = mkt.u * (b / p[None, :])
    spend /= spend.sum(axis=1, keepdims=True)
    return spend.reshape(shape)


# ---------------------------------------------------------------------------
# Run harness
# ---------------------------------------------------------------------------

def run(spec, problem, oracle=None, x0=None, x1=None, gamma_init=1e-2):
    """Execute a solver for ``spec.horizon`` iterations and return a Trace.

    Records one TraceRecord per iteration: objective at the iterate and at
    the running (ergodic) average, the step actually used, the squared
    Bregman residual it produced, and the divergence to the known optimum
    when the problem carries one.

    The adaptive method needs a second initial point: by default it is one
    small prox step of size ``gamma_init`` from x0 along the stage-0 signal
    (deterministic, reproducible, stays in-domain); pass ``x1`` to override.
    The small prestart residual makes the first adaptive step aggressive;
    the residual accumulator absorbs it within one iteration.  A solver
    abort (log-barrier prox leaving its domain) raises SolverAbort carrying
    the partial trace.
    """
    if oracle is None:
        from .oracle import Oracle
        oracle = Oracle(problem)
    geom = problem.geometry
    x_star = problem.x_star
    f_star = problem.f_star
    if x0 is None:
        x0 = geom.center()
    x0 = np.asarray(x0, dtype=float).reshape(geom.dimension)

    if spec.kind == KIND_PR:
        if problem.market is None:
            raise ValueError("proportional response needs a market-backed problem")
        if oracle.config.noise_kind == "sphere-uniform":
            raise ValueError("proportional response consumes utilities, not "
                             "gradient signals; use md-decay for noisy baselines")

    meta = {
        "solver": spec.label,
        "problem": problem.name,
        "horizon": spec.horizon,
        "gamma_init": gamma_init if spec.kind == KIND_ADAMIR else None,
        "f_star": f_star,
        "oracle": oracle.metadata(),
    }
    trace = Trace(meta)
    started = time.perf_counter_ns()

    def record(t, x, avg, gamma, rho_sq):
        trace.append(TraceRecord(
            t=t,
            f_last=problem.value(x),
            f_avg=problem.value(avg),
            gamma=gamma,
            rho_sq=rho_sq,
            div_to_opt=None if x_star is None else geom.divergence(x_star, x),
            wallclock_ns=time.perf_counter_ns() - started,
        ))

    try:
        if spec.kind == KIND_ADAMIR:
            if x1 is None:
                x1 = geom.prox(x0, -gamma_init * oracle.query(x0, 0))
            state = adamir_init(geom, x0, x1)
            trace.meta["rho0_sq"] = state.rho0_sq
            for t in range(1, spec.horizon + 1):
                x_t = state.x_curr
                avg_t = state.average
                adamir_step(state, geom, oracle)
                record(t, x_t, avg_t, state.last_gamma, state.last_rho_sq)
            trace.meta["final_gamma"] = float(state.gamma)
        else:
            x = x0.copy()
            avg_sum = np.zeros_like(x)
            for t in range(1, spec.horizon + 1):
                if spec.kind == KIND_EGD:
                    gamma = spec.gamma
                    x_next = geom.prox(x, -gamma * oracle.query(x, t))
                elif spec.kind == KIND_DECAY:
                    gamma = spec.gamma / np.sqrt(t)
                    x_next = geom.prox(x, -gamma * oracle.query(x, t))
                else:
                    gamma = 1.0
                    mkt = problem.market.with_utilities(oracle.utilities_at(t))
                    x_next = pr_step(mkt, x)
                rho_sq = geom.symmetric_divergence(x, x_next) / gamma ** 2
                avg_sum += x
                record(t, x, avg_sum / t, gamma, rho_sq)
                x = x_next
    except (StepTooLarge, DomainViolation) as exc:
        trace.mark_failed(str(exc))
        raise SolverAbort(f"{spec.label} aborted at iteration {len(trace) + 1}: {exc}",
                          trace=trace, cause=exc) from exc
    return trace
