"""Bregman reference functions, divergences, mirror maps and prox-mappings.

Three closed-form geometries are shipped:

* ``EuclideanGeometry`` -- h(x) = ||x||^2 / 2 on R^d, divergence ||y - x||^2 / 2.
* ``EntropicGeometry``  -- h(x) = sum x log x on the unit simplex (or a product
  of simplices, row-major), divergence = relative entropy; prox is the
  exponential-weights update.
* ``LogBarrierGeometry`` -- h(x) = -sum log x on the open positive orthant,
  divergence = Itakura-Saito.

Primal points and dual vectors are plain 1-D float64 ``numpy`` arrays; there
is no wrapper type.  ``divergence(p, q)`` returns D(p, q) = h(p) - h(q) -
<grad h(q), p - q>, i.e. the first argument is the "moving" point and the
second the base point whose gradient is taken.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainViolation, NoMaximizer, StepTooLarge

# Floor applied inside logs so that exactly-zero coordinates produced by IEEE
# underflow do not yield -inf; interiority itself is guaranteed analytically.
_LOG_FLOOR = 1e-300

_SIMPLEX_TOL = 1e-9


def _as_vector(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        x = x.reshape(dim)
    return x


class BregmanGeometry:
    """Base class: a reference function h with its induced machinery.

    Attributes
    ----------
    kind : str
        One of ``"euclidean"``, ``"entropic"``, ``"log-barrier"``.
    dimension : int
        Ambient dimension d.
    modulus : float
        Strong-convexity modulus K of h with respect to ``ambient_norm``.
    ambient_norm : str
        ``"l2"`` or ``"l1"``; the norm in which K-strong convexity holds.
    """

    kind = "abstract"
    ambient_norm = "l2"

    def __init__(self, dimension, modulus):
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        if modulus <= 0:
            raise ValueError("strong-convexity modulus must be positive")
        self.dimension = int(dimension)
        self.modulus = float(modulus)

    # -- primitives supplied by subclasses ---------------------------------

    def h(self, x):
        """Value of the reference function at x."""
        raise NotImplementedError

    def grad_h(self, x):
        """Gradient (continuous selection) of h at an interior point."""
        raise NotImplementedError

    def divergence(self, p, q):
        """D(p, q) = h(p) - h(q) - <grad h(q), p - q> >= 0."""
        raise NotImplementedError

    def mirror(self, y):
        """Mirror map: argmax_x { <y, x> - h(x) }."""
        raise NotImplementedError

    def prox(self, x, v):
        """Prox-mapping P_x(v) = argmin_p { <v, x - p> + D(p, x) }.

        Equals ``mirror(grad_h(x) + v)`` wherever both are defined.
        """
        raise NotImplementedError

    # -- shared derived operations -----------------------------------------

    def symmetric_divergence(self, x, y):
        """D(x, y) + D(y, x) = <grad h(x) - grad h(y), x - y>."""
        x = self.check_point(x)
        y = self.check_point(y)
        return float(np.dot(self.grad_h(x) - self.grad_h(y), x - y))

    def norm(self, u):
        u = np.asarray(u, dtype=float)
        if self.ambient_norm == "l1":
            return float(np.sum(np.abs(u)))
        return float(np.sqrt(np.dot(u.ravel(), u.ravel())))

    def dual_norm(self, v):
        v = np.asarray(v, dtype=float)
        if self.ambient_norm == "l1":
            return float(np.max(np.abs(v)))
        return float(np.sqrt(np.dot(v.ravel(), v.ravel())))

    def center(self):
        """A canonical interior starting point (barycenter where it exists)."""
        raise NotImplementedError

    def random_point(self, rng):
        """A random point in the domain of grad h, for sampled certificates."""
        raise NotImplementedError

    def check_point(self, x, interior=False):
        """Validate a point against the domain; raises DomainViolation."""
        x = _as_vector(x, self.dimension)
        if not np.all(np.isfinite(x)):
            raise DomainViolation("point has non-finite coordinates")
        return x

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


class EuclideanGeometry(BregmanGeometry):
    """h(x) = ||x||^2 / 2 on all of R^d; prox is the additive update x + v."""

    kind = "euclidean"
    ambient_norm = "l2"

    def __init__(self, dimension):
        super().__init__(dimension, modulus=1.0)

    def h(self, x):
        x = self.check_point(x)
        return 0.5 * float(np.dot(x, x))

    def grad_h(self, x):
        return _as_vector(x, self.dimension)

    def divergence(self, p, q):
        p = self.check_point(p)
        q = self.check_point(q)
        d = p - q
        return 0.5 * float(np.dot(d, d))

    def mirror(self, y):
        return _as_vector(y, self.dimension).copy()

    def prox(self, x, v):
        x = _as_vector(x, self.dimension)
        v = _as_vector(v, self.dimension)
        return x + v

    def center(self):
        return np.zeros(self.dimension)

    def random_point(self, rng):
        return rng.standard_normal(self.dimension)


class EntropicGeometry(BregmanGeometry):
    """Negative entropy on the unit simplex, or on a product of simplices.

    With ``rows > 1`` the domain is the product of ``rows`` simplices of size
    ``dimension // rows`` (points stored row-major as flat vectors) and h is
    the sum of the per-row entropies; divergence and prox factorize per row.
    Strong convexity holds in the L1 norm with modulus 1 on a single simplex
    (Pinsker) and 1/rows on the product (Pinsker plus Cauchy-Schwarz).
    """

    kind = "entropic"
    ambient_norm = "l1"

    def __init__(self, dimension, rows=1):
        if dimension % rows != 0:
            raise ValueError("dimension must be divisible by rows")
        super().__init__(dimension, modulus=1.0 / rows)
        self.rows = int(rows)
        self.row_len = dimension // rows

    def _rowed(self, x):
        return x.reshape(self.rows, self.row_len)

    def h(self, x):
        x = self.check_point(x)
        return float(np.sum(np.where(x > 0.0, x * np.log(np.maximum(x, _LOG_FLOOR)), 0.0)))

    def grad_h(self, x):
        x = _as_vector(x, self.dimension)
        return 1.0 + np.log(np.maximum(x, _LOG_FLOOR))

    def divergence(self, p, q):
        # Generalized relative entropy; the linear correction vanishes on the
        # simplex but keeps the h-based definition exact off it.  Exactly-zero
        # base coordinates (IEEE underflow of a boundary-hugging iterate) are
        # handled by the log floor rather than rejected.
        p = self.check_point(p)
        q = self.check_point(q)
        qs = np.maximum(q, _LOG_FLOOR)
        ent = np.sum(np.where(p > 0.0, p * np.log(np.maximum(p, _LOG_FLOOR) / qs), 0.0))
        return float(ent + np.sum(q) - np.sum(p))

    def mirror(self, y):
        y = _as_vector(y, self.dimension)
        z = self._rowed(y.copy())
        z -= z.max(axis=1, keepdims=True)
        w = np.exp(z)
        w /= w.sum(axis=1, keepdims=True)
        return w.reshape(self.dimension)

    def prox(self, x, v):
        # Exponential weights, log-sum-exp stabilized: weights x * exp(v)
        # renormalized per row, computed as exp(log x + v - max).
        x = _as_vector(x, self.dimension)
        v = _as_vector(v, self.dimension)
        logits = self._rowed(np.log(np.maximum(x, _LOG_FLOOR)) + v)
        logits = logits - logits.max(axis=1, keepdims=True)
        w = np.exp(logits)
        w /= w.sum(axis=1, keepdims=True)
        return w.reshape(self.dimension)

    def center(self):
        return np.full(self.dimension, 1.0 / self.row_len)

    def random_point(self, rng):
        rows = rng.dirichlet(np.ones(self.row_len), size=self.rows)
        rows = np.maximum(rows, 1e-12)
        rows /= rows.sum(axis=1, keepdims=True)
        return rows.reshape(self.dimension)

    def check_point(self, x, interior=False):
        x = super().check_point(x)
        if interior:
            if np.any(x <= 0.0):
                raise DomainViolation("entropic interior point needs strictly positive coordinates")
        elif np.any(x < 0.0):
            raise DomainViolation("entropic point has negative coordinates")
        sums = self._rowed(x).sum(axis=1)
        if np.any(np.abs(sums - 1.0) > _SIMPLEX_TOL):
            raise DomainViolation(f"row sums deviate from 1 by {np.max(np.abs(sums - 1.0)):.3e}")
        return x


class LogBarrierGeometry(BregmanGeometry):
    """h(x) = -sum log x on the open positive orthant.

    The divergence is the Itakura-Saito distance.  h is 1/b^2-strongly convex
    only on boxes (0, b]^d, so ``modulus`` is a caller-declared value valid on
    the region the caller intends to work in (default 1.0, i.e. (0, 1]^d).
    """

    kind = "log-barrier"
    ambient_norm = "l2"

    def __init__(self, dimension, modulus=1.0):
        super().__init__(dimension, modulus=modulus)

    def h(self, x):
        x = self.check_point(x, interior=True)
        return -float(np.sum(np.log(x)))

    def grad_h(self, x):
        x = _as_vector(x, self.dimension)
        return -1.0 / x

    def divergence(self, p, q):
        p = self.check_point(p, interior=True)
        q = self.check_point(q, interior=True)
        r = p / q
        return float(np.sum(r - np.log(r) - 1.0))

    def mirror(self, y):
        y = _as_vector(y, self.dimension)
        if np.any(y >= 0.0):
            raise NoMaximizer("log-barrier mirror map needs strictly negative dual coordinates")
        return -1.0 / y

    def prox(self, x, v):
        x = _as_vector(x, self.dimension)
        v = _as_vector(v, self.dimension)
        denom = 1.0 - x * v
        if np.any(denom <= 0.0):
            raise StepTooLarge("prox argmin escapes the positive orthant; shrink the step")
        return x / denom

    def center(self):
        return np.ones(self.dimension)

    def random_point(self, rng):
        return rng.uniform(0.05, 2.0, size=self.dimension)

    def check_point(self, x, interior=True):
        x = super().check_point(x)
        if np.any(x <= 0.0):
            raise DomainViolation("log-barrier point has nonpositive coordinates")
        return x
