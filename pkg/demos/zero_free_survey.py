# Where do the zeros of p(z) sit for random instances that pass the
# smallness condition?  For each instance we record how far the closest root
# is from [0, 1] and from the disk |z - 1| <= 1 + delta that the estimator
# relies on.

from fractions import Fraction

import numpy as np

from intersectprob import full_p_polynomial
from intersectprob.model import build_dependency_graph
from intersectprob.oracle import random_instance, root_localize

dists, clearances, degrees = [], [], []
for seed in range(300):
    space, events = random_instance(seed, passing=True)
    graph = build_dependency_graph(space, events)
    rep = root_localize(full_p_polynomial(space, events), Fraction(1, 6 * graph.Delta))
    if rep.roots:
        dists.append(rep.min_dist)
        clearances.append(rep.disk_clearance)
        degrees.append(len(rep.roots))

dists = np.array(dists)
print("instances with a nonconstant p:", len(dists))
print("degree counts:", np.bincount(degrees))
print("distance to [0,1], quantiles 0/10/50/90%%: %s" % ", ".join("%.3g" % q for q in np.quantile(dists, [0, .1, .5, .9])))
print("smallest clearance from the disk: %.1f" % min(clearances))


# Rare events push the roots far out: a single event of probability p has
# its root at 1/p.  Even the closest root found here is about ten units out.

print("log10 of the closest root distance, histogram:")
counts, edges = np.histogram(np.log10(dists), bins=6)
for c, lo, hi in zip(counts, edges, edges[1:]):
    print("  %5.2f .. %5.2f  %s" % (lo, hi, "#" * int(c // 2)))
