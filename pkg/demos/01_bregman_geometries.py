"""Tour of the three shipped Bregman geometries.

Shows the reference functions, their divergences, and the two equivalent
routes to the prox-mapping (direct closed form vs mirror map of the shifted
gradient), plus the three-point identity that powers the convergence
analysis.
"""

import numpy as np

from bregopt import EntropicGeometry, EuclideanGeometry, LogBarrierGeometry

rng = np.random.default_rng(0)

print("=== Reference functions ===")
euclid = EuclideanGeometry(3)
simplex = EntropicGeometry(3)
orthant = LogBarrierGeometry(3)

x = np.array([0.2, 0.3, 0.5])
print(f"half-square norm   h({x}) = {euclid.h(x):.6f}")
print(f"negative entropy   h({x}) = {simplex.h(x):.6f}")
print(f"log barrier        h({x}) = {orthant.h(x):.6f}")

print("\n=== Divergences are asymmetric, nonnegative, and vanish only at y=x ===")
y = np.array([0.5, 0.25, 0.25])
for name, geom in [("euclidean", euclid), ("entropic", simplex), ("log-barrier", orthant)]:
    print(f"{name:12s} D(y,x) = {geom.divergence(y, x):.6f}   "
          f"D(x,y) = {geom.divergence(x, y):.6f}   D(x,x) = {geom.divergence(x, x):.2e}")

print("\n=== Prox two ways: closed form vs mirror map of grad h(x) + v ===")
v = np.array([0.4, -0.2, 0.1])
for name, geom in [("euclidean", euclid), ("entropic", simplex), ("log-barrier", orthant)]:
    direct = geom.prox(x, v)
    via_mirror = geom.mirror(geom.grad_h(x) + v)
    print(f"{name:12s} prox = {np.round(direct, 6)}   max dev = "
          f"{np.max(np.abs(direct - via_mirror)):.2e}")

print("\nThe entropic prox is the exponential-weights update: multiply by e^v,")
print("renormalize.  A gradient step never leaves the simplex, no projection needed:")
big_step = simplex.prox(x, np.array([40.0, -3.0, 1.0]))
print(f"prox(x, huge v) = {np.round(big_step, 9)}  (sums to {big_step.sum():.1f})")

print("\n=== Three-point identity (the 'rule of cosines') ===")
print("D(p,y) = D(p,x) + D(x,y) + <grad h(y) - grad h(x), x - p>")
for name, geom in [("euclidean", euclid), ("entropic", simplex), ("log-barrier", orthant)]:
    p, xx, yy = (geom.random_point(rng) for _ in range(3))
    lhs = geom.divergence(p, yy)
    rhs = (geom.divergence(p, xx) + geom.divergence(xx, yy)
           + float(np.dot(geom.grad_h(yy) - geom.grad_h(xx), xx - p)))
    print(f"{name:12s} |lhs - rhs| = {abs(lhs - rhs):.2e}")

print("\n=== Strong convexity anchors divergence to the ambient norm ===")
print("entropic (Pinsker): D(y,x) >= 0.5 |y-x|_1^2 on the simplex")
worst = 1.0
for _ in range(1000):
    a, b = simplex.random_point(rng), simplex.random_point(rng)
    l1 = np.abs(a - b).sum()
    worst = min(worst, simplex.divergence(a, b) - 0.5 * l1 ** 2)
print(f"min margin over 1000 pairs: {worst:.6f} (never negative)")
