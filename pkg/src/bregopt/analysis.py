"""Trace model, rate estimation, and runtime certificate checks.

A Trace is the unit of all analysis and output: per-iteration telemetry
(objective at iterate and ergodic average, step, squared residual, divergence
to the solution) plus run metadata.  Traces round-trip through a CSV schema

    t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns

with the metadata embedded as a single ``#``-prefixed JSON comment line, so
every output file carries the full configuration and seeds needed to
reproduce it.  ``div_to_opt`` is empty when no reference optimum is known;
``wallclock_ns`` is written only on request because timing is the one column
that would break byte-level reproducibility.

The module also houses the numeric-sequence inequalities that the adaptive
step-size analysis leans on; they are theorems, so a sampled violation means
a transcription bug, and the checker raises with the offending sequence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (LemmaViolation, MismatchedHorizons, MissingOptimum,
                     NonPositiveGap)

CSV_HEADER = "t,f_last,f_avg,gamma,rho_sq,div_to_opt,wallclock_ns"

_Z95 = 1.959963984540054  # two-sided 95% normal quantile
_GAP_FLOOR = 1e-15


@dataclass
class TraceRecord:
    """One iteration of telemetry."""

    t: int
    f_last: float
    f_avg: float
    gamma: float
    rho_sq: float
    div_to_opt: float | None
    wallclock_ns: int


class Trace:
    """Per-iteration telemetry columns plus run metadata."""

    def __init__(self, meta=None):
        self.meta = dict(meta or {})
        self._rows = []
        self.failed = False
        self.failure = None

    def append(self, rec):
        if rec.gamma <= 0:
            raise ValueError("recorded step must be positive")
        if rec.rho_sq < 0:
            raise ValueError("recorded squared residual must be nonnegative")
        if self._rows and rec.t <= self._rows[-1].t:
            raise ValueError("iteration indices must be strictly increasing")
        self._rows.append(rec)

    def mark_failed(self, reason):
        self.failed = True
        self.failure = reason

    def __len__(self):
        return len(self._rows)

    def records(self):
        return list(self._rows)

    def column(self, name):
        if name == "div_to_opt":
            return np.array([math.nan if r.div_to_opt is None else r.div_to_opt
                             for r in self._rows], dtype=float)
        return np.array([getattr(r, name) for r in self._rows], dtype=float)

    @property
    def t(self):
        return np.array([r.t for r in self._rows], dtype=int)

    @property
    def f_star(self):
        return self.meta.get("f_star")

    def final(self, name):
        return getattr(self._rows[-1], name)

    def value_at(self, t, name):
        """Column value at iteration index t (records need not start at 1)."""
        for r in self._rows:
            if r.t == t:
                return getattr(r, name)
        raise KeyError(f"no record at iteration {t}")

    # -- serialization -------------------------------------------------------

    def to_csv(self, path, timing=False):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# " + json.dumps(self._meta_for_disk(), sort_keys=True) + "\n")
            fh.write(CSV_HEADER + "\n")
            for r in self._rows:
                div = "" if r.div_to_opt is None else repr(float(r.div_to_opt))
                wall = repr(int(r.wallclock_ns)) if timing else ""
                fh.write(f"{r.t},{float(r.f_last)!r},{float(r.f_avg)!r},"
                         f"{float(r.gamma)!r},{float(r.rho_sq)!r},{div},{wall}\n")

    def _meta_for_disk(self):
        meta = dict(self.meta)
        if self.failed:
            meta["failed"] = True
            meta["failure"] = self.failure
        return meta

    @classmethod
    def from_csv(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        meta = {}
        if lines and lines[0].startswith("#"):
            meta = json.loads(lines.pop(0).lstrip("#").strip())
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError(f"{path}: expected header {CSV_HEADER!r}")
        trace = cls(meta)
        trace.failed = bool(meta.pop("failed", False))
        trace.failure = meta.pop("failure", None)
        for line in lines[1:]:
            if not line:
                continue
            cells = line.split(",")
            trace._rows.append(TraceRecord(
                t=int(cells[0]),
                f_last=float(cells[1]),
                f_avg=float(cells[2]),
                gamma=float(cells[3]),
                rho_sq=float(cells[4]),
                div_to_opt=None if cells[5] == "" else float(cells[5]),
                wallclock_ns=0 if cells[6] == "" else int(cells[6]),
            ))
        return trace


# ---------------------------------------------------------------------------
# Rate fitting
# ---------------------------------------------------------------------------

@dataclass
class RateFit:
    """Least-squares power law fit: log(gap) = slope * log(t) + intercept."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple

    def as_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "window": list(self.window)}


_FIT_FIELDS = ("f_avg_gap", "f_last_gap", "div_to_opt")


def fit_rate(trace, fieldname, window=None, f_star=None):
    """Fit a log-log line to a gap column of the trace over a window.

    ``fieldname`` is one of ``f_avg_gap``, ``f_last_gap`` (objective minus the
    reference optimum) or ``div_to_opt``.  The default window drops the first
    10% of iterations as burn-in.  Raises NonPositiveGap if the window holds
    values at or below 1e-15 (converged past float precision; report that
    success separately rather than fitting noise).
    """
    if fieldname not in _FIT_FIELDS:
        raise ValueError(f"fieldname must be one of {_FIT_FIELDS}")
    ts = trace.t.astype(float)
    if fieldname == "div_to_opt":
        gaps = trace.column("div_to_opt")
        if np.isnan(gaps).any():
            raise MissingOptimum("trace has no divergence-to-optimum column")
    else:
        f_star = trace.f_star if f_star is None else f_star
        if f_star is None:
            raise MissingOptimum("gap fit needs a reference optimum")
        col = "f_avg" if fieldname == "f_avg_gap" else "f_last"
        gaps = trace.column(col) - float(f_star)
    if window is None:
        lo = max(int(ts[0]), int(math.ceil(0.1 * ts[-1])))
        window = (lo, int(ts[-1]))
    mask = (ts >= window[0]) & (ts <= window[1])
    if mask.sum() < 2:
        raise ValueError("window must contain at least two records")
    ts, gaps = ts[mask], gaps[mask]
    if np.any(gaps <= _GAP_FLOOR):
        raise NonPositiveGap(
            f"{fieldname} reaches {gaps.min():.3e} inside the window")
    x, y = np.log(ts), np.log(gaps)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_sq = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - float(np.sum(resid ** 2)) / ss_tot)
    return RateFit(float(slope), float(intercept), min(1.0, r_sq), tuple(window))


# ---------------------------------------------------------------------------
# Certificate checks on traces
# ---------------------------------------------------------------------------

@dataclass
class CertificateReport:
    name: str
    passed: bool
    lhs: float
    rhs: float
    detail: dict

    def as_dict(self):
        return {"name": self.name, "passed": self.passed,
                "lhs": self.lhs, "rhs": self.rhs, "detail": self.detail}


def check_regret_certificate(trace, f_star=None, upto=None):
    """Anytime regret bound of the adaptive method on a deterministic run.

    With gamma_T the step used at iteration T, the cumulative optimality gap
    must satisfy

        sum_{t<=T} [f(X_t) - f*]
            <= D(x*, X_1)/gamma_T + (sum gamma_t^2 rho_t^2)/gamma_T
               + sum gamma_t rho_t^2

    up to 1e-6 relative slack.  Needs the divergence column (its first entry
    is D(x*, X_1)) and a reference optimum.
    """
    f_star = trace.f_star if f_star is None else f_star
    if f_star is None:
        raise MissingOptimum("regret certificate needs a reference optimum")
    div = trace.column("div_to_opt")
    if np.isnan(div[:1]).any():
        raise MissingOptimum("regret certificate needs D(x*, X_1) in the trace")
    T = len(trace) if upto is None else int(upto)
    f_last = trace.column("f_last")[:T]
    gamma = trace.column("gamma")[:T]
    rho_sq = trace.column("rho_sq")[:T]
    lhs = float(np.sum(f_last - f_star))
    gamma_T = gamma[-1]
    term_init = div[0] / gamma_T
    term_sq = float(np.sum(gamma ** 2 * rho_sq)) / gamma_T
    term_lin = float(np.sum(gamma * rho_sq))
    rhs = term_init + term_sq + term_lin
    passed = lhs <= rhs + 1e-6 * (1.0 + abs(rhs))
    return CertificateReport(
        name=f"regret@{T}", passed=bool(passed), lhs=lhs, rhs=rhs,
        detail={"T": T, "init_term": term_init, "sq_term": term_sq,
                "lin_term": term_lin, "gamma_T": float(gamma_T)})


def check_divergence_bound(trace, upto=None):
    """Divergence to the solution never exceeds its start plus step energy.

    D(x*, X_t) <= D(x*, X_1) + sum_{s<=T} gamma_s^2 rho_s^2 + 1e-6, all t<=T.
    """
    div = trace.column("div_to_opt")
    if np.isnan(div[:1]).any():
        raise MissingOptimum("divergence bound needs the divergence column")
    T = len(trace) if upto is None else int(upto)
    div = div[:T]
    gamma = trace.column("gamma")[:T]
    rho_sq = trace.column("rho_sq")[:T]
    budget = div[0] + float(np.sum(gamma ** 2 * rho_sq))
    worst = float(np.max(div))
    passed = worst <= budget + 1e-6
    return CertificateReport(
        name=f"divergence-bound@{T}", passed=bool(passed), lhs=worst, rhs=budget,
        detail={"T": T})


def check_step_identity(trace, rel_tol=1e-9):
    """Algebraic identity 1/gamma_t^2 = rho_0^2 + sum_{s<t} rho_s^2.

    Checked at every recorded iteration and, when the trace carries the
    post-run step, for the whole run.  Returns the max relative error.
    """
    rho0_sq = trace.meta.get("rho0_sq")
    if rho0_sq is None:
        raise MissingOptimum("step identity needs rho0_sq in the trace metadata")
    gamma = trace.column("gamma")
    rho_sq = trace.column("rho_sq")
    partial = rho0_sq + np.concatenate(([0.0], np.cumsum(rho_sq)[:-1]))
    worst = float(np.max(np.abs(1.0 / gamma ** 2 - partial) / np.abs(partial)))
    final_gamma = trace.meta.get("final_gamma")
    if final_gamma is not None:
        total = rho0_sq + float(np.sum(rho_sq))
        worst = max(worst, abs(1.0 / final_gamma ** 2 - total) / total)
    if worst > rel_tol:
        raise LemmaViolation(f"step/residual identity violated: rel err {worst:.3e}")
    return worst


# ---------------------------------------------------------------------------
# Numeric-sequence inequalities
# ---------------------------------------------------------------------------

def _relative_slack(bound, tol):
    return tol * (1.0 + abs(bound))


def lemma_sqrt_sum(a):
    """(lower, value, upper) for sum a_t / sqrt(sum_{i<=t} a_i) vs sqrt(sum a)."""
    a = np.asarray(a, dtype=float)
    total = float(a.sum())
    cum = np.cumsum(a)
    mask = a > 0.0
    value = float(np.sum(a[mask] / np.sqrt(cum[mask])))
    return math.sqrt(total), value, 2.0 * math.sqrt(total)


def lemma_log_plus_one(a):
    """(value, upper) for sum a_t / (1 + sum_{i<=t} a_i) vs 1 + log(1 + sum a)."""
    a = np.asarray(a, dtype=float)
    cum = np.cumsum(a)
    value = float(np.sum(a / (1.0 + cum)))
    return value, 1.0 + math.log1p(float(a.sum()))


def lemma_log_ratio(b):
    """(value, upper) for sum b_t / sum_{i<=t} b_i vs 2 + log(sum b / b_1); b_1 > 0."""
    b = np.asarray(b, dtype=float)
    if b[0] <= 0.0:
        raise ValueError("first element must be positive")
    cum = np.cumsum(b)
    value = float(np.sum(b / cum))
    return value, 2.0 + math.log(float(b.sum()) / float(b[0]))


def _offset_denominators(a, a0):
    a = np.asarray(a, dtype=float)
    if a0 <= 0.0:
        raise ValueError("offset a0 must be positive")
    return a, a0 + np.concatenate(([0.0], np.cumsum(a)[:-1]))


def lemma_offset_sqrt(a, a0):
    """Two-sided bound on sum a_t / sqrt(a0 + sum_{i<t} a_i), a_t in [0, a]."""
    a, denom = _offset_denominators(a, a0)
    value = float(np.sum(a / np.sqrt(denom)))
    head = a0 + float(a[:-1].sum())
    peak = float(a.max()) if len(a) else 0.0
    lower = math.sqrt(head) - math.sqrt(a0)
    upper = 2.0 * peak / math.sqrt(a0) + 3.0 * math.sqrt(peak) + 3.0 * math.sqrt(head)
    return lower, value, upper


def lemma_offset_log(a, a0):
    """Upper bound on sum a_t / (a0 + sum_{i<t} a_i), a_t in [0, a]."""
    a, denom = _offset_denominators(a, a0)
    value = float(np.sum(a / denom))
    peak = float(a.max()) if len(a) else 0.0
    upper = 2.0 + 4.0 * peak / a0 + 2.0 * math.log1p(float(a[:-1].sum()) / a0)
    return value, upper


def _random_sequence(rng):
    length = int(rng.integers(1, 201))
    scales = 10.0 ** rng.uniform(-6.0, 3.0, size=length)
    seq = rng.uniform(0.0, 1.0, size=length) * scales
    seq[rng.uniform(size=length) < 0.2] = 0.0
    return seq


def check_sequence_lemmas(samples=10_000, seed=0, tol=1e-9):
    """Sampled verification of the five step-size inequalities.

    Random nonnegative sequences of lengths 1..200 with magnitudes mixed over
    1e-6..1e3 (including zero entries); each inequality must hold within
    ``tol`` relative slack.  These are theorems, so any violation raises
    LemmaViolation carrying the sequence.  Returns a small report dict.
    """
    rng = np.random.default_rng(seed)
    checked = 0
    for _ in range(samples):
        seq = _random_sequence(rng)
        a0 = float(10.0 ** rng.uniform(-6.0, 3.0))

        lower, value, upper = lemma_sqrt_sum(seq)
        if not (lower - _relative_slack(lower, tol) <= value <= upper + _relative_slack(upper, tol)):
            raise LemmaViolation("sqrt-sum inequality failed", sequence=seq)

        value, upper = lemma_log_plus_one(seq)
        if value > upper + _relative_slack(upper, tol):
            raise LemmaViolation("log(1+sum) inequality failed", sequence=seq)

        head = seq.copy()
        head[0] = a0
        value, upper = lemma_log_ratio(head)
        if value > upper + _relative_slack(upper, tol):
            raise LemmaViolation("log-ratio inequality failed", sequence=head)

        lower, value, upper = lemma_offset_sqrt(seq, a0)
        if not (lower - _relative_slack(lower, tol) <= value <= upper + _relative_slack(upper, tol)):
            raise LemmaViolation("offset sqrt inequality failed", sequence=seq)

        value, upper = lemma_offset_log(seq, a0)
        if value > upper + _relative_slack(upper, tol):
            raise LemmaViolation("offset log inequality failed", sequence=seq)

        checked += 1
    return {"samples": checked, "tol": tol, "seed": seed}


# ---------------------------------------------------------------------------
# Multi-seed aggregation
# ---------------------------------------------------------------------------

def summarize_multiseed(traces):
    """Per-iteration mean and 95% normal CI of f_last / f_avg across seeds.

    All traces must share a horizon.  A single trace yields its own values
    with zero-width intervals.
    """
    if not traces:
        raise ValueError("need at least one trace")
    horizons = {len(tr) for tr in traces}
    if len(horizons) != 1:
        raise MismatchedHorizons(f"traces have horizons {sorted(horizons)}")
    S = len(traces)
    out = {"num_seeds": S, "horizon": horizons.pop(),
           "t": traces[0].t.tolist()}
    for name in ("f_last", "f_avg"):
        stack = np.vstack([tr.column(name) for tr in traces])
        mean = stack.mean(axis=0)
        if S > 1:
            half = _Z95 * stack.std(axis=0, ddof=1) / math.sqrt(S)
        else:
            half = np.zeros_like(mean)
        out[name] = {"mean": mean.tolist(), "ci95": half.tolist()}
    return out
