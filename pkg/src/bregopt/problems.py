"""Convex test problems with declared relative-regularity constants.

The flagship instance is the linear Fisher market: N buyers with unit budgets
bid on M divisible goods, prices are bid sums per good, and equilibria are
the minimizers of the convex potential

    Phi(b) = sum_j p_j log p_j - sum_ij b_ij log u_ij,    p_j = sum_i b_ij,

over the product of per-buyer simplices.  Phi is smooth relative to the
negative entropy on that product with constant 1, but is not Lipschitz in any
ambient norm (the log blows up at the boundary).

A synthetic linear objective on the simplex provides the complementary case:
relatively continuous (bounded RC constant w.r.t. entropy) but not smooth.
Regularity constants are certified by randomized sampling at construction;
a failed certificate is a hard error, never a warning.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import CertificateViolation, DomainViolation
from .geometry import EntropicGeometry

_CERT_SLACK = 1e-9
_OPTIMALITY_TOL = 1e-6


class Problem:
    """A convex objective bound to the Bregman geometry its constants refer to.

    Parameters
    ----------
    name : str
        Short label used in traces and output files.
    geometry : BregmanGeometry
        Reference geometry; also the feasible-domain descriptor.
    value, gradient : callables
        f(x) and a subgradient selection, on flat arrays of length
        ``geometry.dimension``.
    rc_constant : float, optional
        Certified relative-continuity constant G, if known.
    rs_constant : float, optional
        Certified relative-smoothness constant L, if known.
    known_optimum : (ndarray, float), optional
        A minimizer and the minimum value; first-order optimality is checked
        at construction to 1e-6.
    """

    def __init__(self, name, geometry, value, gradient,
                 rc_constant=None, rs_constant=None, known_optimum=None,
                 market=None):
        if rc_constant is not None and rc_constant <= 0:
            raise ValueError("rc_constant must be positive when given")
        if rs_constant is not None and rs_constant <= 0:
            raise ValueError("rs_constant must be positive when given")
        self.name = name
        self.geometry = geometry
        self.dimension = geometry.dimension
        self._value = value
        self._gradient = gradient
        self.rc_constant = rc_constant
        self.rs_constant = rs_constant
        self.market = market
        if known_optimum is not None:
            x_star = np.asarray(known_optimum[0], dtype=float).reshape(self.dimension)
            f_star = float(known_optimum[1])
            gap = first_order_gap(geometry, gradient(x_star), x_star)
            if gap > _OPTIMALITY_TOL:
                raise CertificateViolation(
                    f"claimed optimum violates first-order optimality by {gap:.3e}")
            known_optimum = (x_star, f_star)
        self.known_optimum = known_optimum

    @property
    def f_star(self):
        return None if self.known_optimum is None else self.known_optimum[1]

    @property
    def x_star(self):
        return None if self.known_optimum is None else self.known_optimum[0]

    def value(self, x):
        return self._value(x)

    def gradient(self, x):
        return self._gradient(x)

    def __repr__(self):
        return f"Problem({self.name!r}, d={self.dimension})"


def first_order_gap(geometry, g, x):
    """Linearized decrease available at x; zero at a constrained minimizer.

    On (products of) simplices this is sum_rows [<g_r, x_r> - min_j g_rj];
    on unconstrained domains it is the dual norm of the gradient.
    """
    g = np.asarray(g, dtype=float).reshape(geometry.dimension)
    if geometry.kind == "entropic":
        rows = getattr(geometry, "rows", 1)
        gr = g.reshape(rows, -1)
        xr = np.asarray(x, dtype=float).reshape(rows, -1)
        return float(np.sum(np.sum(gr * xr, axis=1) - gr.min(axis=1)))
    return geometry.dual_norm(g)


# ---------------------------------------------------------------------------
# Fisher market
# ---------------------------------------------------------------------------

class FisherMarket:
    """A linear Fisher market: N unit-budget buyers, M divisible goods.

    ``utilities[i, j]`` is buyer i's marginal utility for good j; all entries
    must be strictly positive.  Feasible bid profiles are row-stochastic
    N x M matrices (each buyer spreads a unit budget over the goods).
    """

    def __init__(self, utilities, seed=None, lo=None, hi=None):
        u = np.asarray(utilities, dtype=float)
        if u.ndim != 2:
            raise ValueError("utilities must be an N x M matrix")
        if not np.all(np.isfinite(u)) or np.any(u <= 0.0):
            raise ValueError("utilities must be finite and strictly positive")
        self.u = u
        self.n, self.m = u.shape
        self.log_u = np.log(u)
        # provenance of a random draw, kept for reproducible manifests
        self.seed = seed
        self.lo = lo
        self.hi = hi

    def dimension(self):
        return self.n * self.m

    def bids(self, b):
        """Validate and reshape a bid profile to (N, M)."""
        b = np.asarray(b, dtype=float).reshape(self.n, self.m)
        if np.any(b < 0.0):
            raise DomainViolation("bids must be nonnegative")
        return b

    def prices(self, b):
        return self.bids(b).sum(axis=0)

    def with_utilities(self, u):
        return FisherMarket(u)

    def __repr__(self):
        return f"FisherMarket(n={self.n}, m={self.m})"


def fisher_objective(mkt, b):
    """Market potential Phi(b) = sum_j p_j log p_j - sum_ij b_ij log u_ij.

    Uses the continuity convention 0 log 0 = 0, so zero bids and zero prices
    are admissible.
    """
    b = mkt.bids(b)
    p = b.sum(axis=0)
    price_part = np.sum(np.where(p > 0.0, p * np.log(np.maximum(p, 1e-300)), 0.0))
    bid_part = np.sum(b * mkt.log_u)
    return float(price_part - bid_part)


def fisher_gradient(mkt, b):
    """Gradient of Phi, componentwise 1 + log p_j - log u_ij; needs p_j > 0."""
    b = mkt.bids(b)
    p = b.sum(axis=0)
    if np.any(p <= 0.0):
        raise DomainViolation("all prices must be positive to evaluate the gradient")
    g = 1.0 + np.log(p)[None, :] - mkt.log_u
    return g.reshape(mkt.dimension())


def fisher_geometry(mkt):
    """The per-buyer negative entropy summed over buyers (product simplex)."""
    return EntropicGeometry(mkt.dimension(), rows=mkt.n)


def make_random_market(n, m, lo, hi, seed):
    """Draw utilities i.i.d. Uniform[lo, hi]; deterministic in the seed."""
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    rng = np.random.default_rng(seed)
    u = rng.uniform(lo, hi, size=(n, m))
    return FisherMarket(u, seed=seed, lo=lo, hi=hi)


def market_to_json(mkt):
    payload = {
        "n": mkt.n,
        "m": mkt.m,
        "seed": mkt.seed,
        "lo": mkt.lo,
        "hi": mkt.hi,
        "u": [float(v) for v in mkt.u.ravel()],
    }
    return json.dumps(payload, sort_keys=True)


def market_from_json(text):
    payload = json.loads(text)
    u = np.asarray(payload["u"], dtype=float).reshape(payload["n"], payload["m"])
    return FisherMarket(u, seed=payload.get("seed"),
                        lo=payload.get("lo"), hi=payload.get("hi"))


def fisher_rs_certificate(mkt, level=1.0, samples=1000, seed=0):
    """Certify relative smoothness of Phi w.r.t. the product entropy.

    Samples interior bid pairs (x, y) and checks the descent-lemma form
    Phi(x) <= Phi(y) + <grad Phi(y), x - y> + level * D(x, y) + slack.
    Returns ``level`` on success; raises CertificateViolation with the first
    violating pair otherwise.  The certified value for linear Fisher markets
    is level = 1.
    """
    geom = fisher_geometry(mkt)
    rng = np.random.default_rng(seed)
    for k in range(samples):
        x = geom.random_point(rng)
        y = geom.random_point(rng)
        lhs = fisher_objective(mkt, x)
        rhs = (fisher_objective(mkt, y)
               + float(np.dot(fisher_gradient(mkt, y), x - y))
               + level * geom.divergence(x, y))
        if lhs > rhs + _CERT_SLACK:
            raise CertificateViolation(
                f"RS certificate with L={level} failed on sample {k}: "
                f"lhs={lhs:.12g} > rhs={rhs:.12g}")
    return float(level)


def solve_fisher_reference(mkt, tol=1e-12, max_iters=500_000):
    """Reference equilibrium by iterating proportional response to a fixed point.

    Runs until the symmetric divergence between consecutive bid profiles drops
    below ``tol`` (the unit-step Bregman residual of the iteration).  Returns
    (bids, value).
    """
    from .solvers import pr_step

    geom = fisher_geometry(mkt)
    b = geom.center()
    for _ in range(max_iters):
        b_next = pr_step(mkt, b)
        if geom.symmetric_divergence(b, b_next) < tol:
            b = b_next
            break
        b = b_next
    else:
        raise CertificateViolation(
            f"proportional response did not reach residual {tol} in {max_iters} iterations")
    return b, fisher_objective(mkt, b)


def fisher_problem(mkt, reference_optimum=True, certify=True,
                   certificate_samples=1000, certificate_seed=0):
    """Wrap a market as a Problem on the product-entropy geometry.

    With ``reference_optimum`` a high-accuracy equilibrium is computed by
    proportional response and recorded as the known optimum.
    """
    geom = fisher_geometry(mkt)
    if certify:
        level = fisher_rs_certificate(mkt, 1.0, certificate_samples, certificate_seed)
    else:
        level = 1.0
    optimum = solve_fisher_reference(mkt) if reference_optimum else None
    return Problem(
        name=f"fisher-{mkt.n}x{mkt.m}",
        geometry=geom,
        value=lambda x: fisher_objective(mkt, x),
        gradient=lambda x: fisher_gradient(mkt, x),
        rs_constant=level,
        known_optimum=optimum,
        market=mkt,
    )


# ---------------------------------------------------------------------------
# Synthetic relatively-continuous instance
# ---------------------------------------------------------------------------

def rc_certificate(geom, gradient, bound, samples=1000, seed=0):
    """Sampled check of <grad f(x), x - y> <= bound * sqrt(2 D(y, x))."""
    rng = np.random.default_rng(seed)
    for k in range(samples):
        x = geom.random_point(rng)
        y = geom.random_point(rng)
        lhs = float(np.dot(gradient(x), x - y))
        rhs = bound * np.sqrt(2.0 * geom.divergence(y, x))
        if lhs > rhs + _CERT_SLACK:
            raise CertificateViolation(
                f"RC certificate with G={bound} failed on sample {k}: "
                f"lhs={lhs:.12g} > rhs={rhs:.12g}")
    return float(bound)


def make_synthetic_rc_problem(d, costs=None, certificate_samples=1000,
                              certificate_seed=0):
    """Linear objective <c, x> on the simplex with the entropic geometry.

    Linear functions on the simplex are relatively continuous w.r.t. entropy
    but have no meaningful smoothness constant there, which makes this the
    sqrt-rate counterpart to the Fisher instance.  The declared constant
    G = max|c| * sqrt(2/K) is certified by sampling at construction.

    Default costs are evenly spaced on [0, 1] (so d=2 gives c=(0,1) with the
    first vertex optimal).
    """
    if d < 2:
        raise ValueError("need dimension >= 2")
    c = np.linspace(0.0, 1.0, d) if costs is None else np.asarray(costs, dtype=float).reshape(d)
    geom = EntropicGeometry(d)
    bound = float(np.max(np.abs(c)) * np.sqrt(2.0 / geom.modulus))
    gradient = lambda x: c.copy()
    rc_certificate(geom, gradient, bound, certificate_samples, certificate_seed)
    x_star = np.zeros(d)
    x_star[int(np.argmin(c))] = 1.0
    return Problem(
        name=f"linear-simplex-{d}",
        geometry=geom,
        value=lambda x: float(np.dot(c, x)),
        gradient=gradient,
        rc_constant=bound,
        known_optimum=(x_star, float(np.min(c))),
    )
