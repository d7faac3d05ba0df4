"""Stochastic first-order oracles: gradient signals with bounded, zero-mean noise.

An oracle returns g(x, t) = grad f(x) + U_t where the noise U_t is zero-mean
and bounded almost surely by the level sigma in the dual norm.  The noise at
stage t is a pure function of (seed, t) - counter-based randomness - so
signal streams are bit-reproducible regardless of call order or scheduling.

Two noise channels are shipped:

* ``sphere-uniform``: U = r * z/|z|_2 with r ~ U[0, sigma] and z standard
  normal.  Spherically symmetric hence exactly zero-mean, and |U|_2 <= sigma
  almost surely, which also bounds the L-infinity dual norm used by the
  entropic geometries.
* ``fisher-resample``: the gradient of the market potential evaluated with
  utilities u * (1 + delta), delta ~ U[-rel_width, rel_width] entrywise,
  redrawn each stage.  Its effective sigma has no closed form and is
  estimated empirically; the bias of this channel is not exactly zero, so
  certificate checks should use the sphere channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import fisher_gradient

NOISE_NONE = "none"
NOISE_SPHERE = "sphere-uniform"
NOISE_RESAMPLE = "fisher-resample"

_KINDS = (NOISE_NONE, NOISE_SPHERE, NOISE_RESAMPLE)


@dataclass(frozen=True)
class OracleConfig:
    """Noise level, channel, and stream seed for a gradient oracle.

    ``sigma`` must be 0 exactly when the channel is ``none``; for the
    resample channel it is left ``None`` and estimated from probes.
    """

    sigma: float | None = 0.0
    noise_kind: str = NOISE_NONE
    seed: int = 0
    rel_width: float = 0.0

    def __post_init__(self):
        if self.noise_kind not in _KINDS:
            raise ValueError(f"unknown noise kind {self.noise_kind!r}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.noise_kind == NOISE_NONE:
            if self.sigma not in (0, 0.0, None):
                raise ValueError("noiseless oracle requires sigma = 0")
        elif self.noise_kind == NOISE_SPHERE:
            if not (self.sigma is not None and self.sigma > 0):
                raise ValueError("sphere-uniform noise requires sigma > 0")
        else:
            if not (0.0 < self.rel_width < 1.0):
                raise ValueError("fisher-resample needs 0 < rel_width < 1")
            if self.sigma is not None:
                raise ValueError("fisher-resample sigma is estimated, pass None")


class Oracle:
    """Gradient-signal source for a problem under an OracleConfig."""

    def __init__(self, problem, config=None):
        self.problem = problem
        self.config = config if config is not None else OracleConfig()
        if self.config.noise_kind == NOISE_RESAMPLE and problem.market is None:
            raise ValueError("fisher-resample noise needs a market-backed problem")
        self._sigma_estimate = None

    @property
    def sigma(self):
        if self.config.noise_kind == NOISE_RESAMPLE:
            return self.estimated_sigma()
        return 0.0 if self.config.sigma is None else float(self.config.sigma)

    def _rng(self, t):
        return np.random.default_rng((int(self.config.seed), int(t)))

    def query(self, x, t):
        """Signal grad f(x) + U_t; deterministic given (seed, t)."""
        kind = self.config.noise_kind
        if kind == NOISE_NONE:
            return self.problem.gradient(x)
        if kind == NOISE_SPHERE:
            g = self.problem.gradient(x)
            rng = self._rng(t)
            z = rng.standard_normal(g.shape[0])
            radius = rng.uniform(0.0, self.config.sigma)
            return g + radius * z / np.sqrt(np.dot(z, z))
        mkt = self.problem.market.with_utilities(self.utilities_at(t))
        return fisher_gradient(mkt, x)

    def utilities_at(self, t):
        """Stage-t utility matrix (perturbed for the resample channel)."""
        mkt = self.problem.market
        if self.config.noise_kind != NOISE_RESAMPLE:
            return mkt.u
        delta = self._rng(t).uniform(-self.config.rel_width, self.config.rel_width,
                                     size=mkt.u.shape)
        return mkt.u * (1.0 + delta)

    def estimated_sigma(self, probes=10_000):
        """Empirical noise level of the resample channel.

        Max dual-norm deviation of the signal from the exact gradient over
        ``probes`` random interior points; recorded in run metadata because
        the channel has no closed-form sigma.  Cached after the first call.
        """
        if self.config.noise_kind != NOISE_RESAMPLE:
            return self.sigma
        if self._sigma_estimate is None:
            geom = self.problem.geometry
            rng = np.random.default_rng((int(self.config.seed), 0xD15C))
            worst = 0.0
            for t in range(probes):
                x = geom.random_point(rng)
                dev = geom.dual_norm(self.query(x, t) - self.problem.gradient(x))
                worst = max(worst, dev)
            self._sigma_estimate = worst
        return self._sigma_estimate

    def metadata(self):
        meta = {
            "noise_kind": self.config.noise_kind,
            "seed": int(self.config.seed),
            "sigma": self.sigma if self.config.noise_kind != NOISE_RESAMPLE else None,
        }
        if self.config.noise_kind == NOISE_RESAMPLE:
            meta["rel_width"] = self.config.rel_width
            if self._sigma_estimate is not None:
                meta["sigma"] = self._sigma_estimate
        return meta
