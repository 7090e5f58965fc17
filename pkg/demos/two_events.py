# Two fair bits and two overlapping bad events.
#
# A1 = {x1 = 1} and A2 = {x1 = 1 and x2 = 1}.  Nothing here is rare, so the
# smallness condition fails, but the interpolation still lands close because
# p(z) has no zeros near the disk it needs.

import math
from fractions import Fraction

from intersectprob import (CoordinateSpace, Event, ProductSpace, estimate_log_intersection,
                           exact_intersection_probability, full_p_polynomial)
from intersectprob.oracle import root_localize

bit = CoordinateSpace.uniform("bit", (0, 1))
space = ProductSpace((bit, bit))
a1 = Event.from_tuples(space, "A1", [0], [(1,)])
a2 = Event.from_tuples(space, "A2", [0, 1], [(1, 1)])

p = full_p_polynomial(space, [a1, a2])
print("p(z) coefficients:", [str(x) for x in p])
print("p(1) =", sum(p), " exact:", exact_intersection_probability(space, [a1, a2]))

rep = root_localize(p)
print("roots:", rep.roots)
print("distance to [0, 1]: %.5f" % rep.min_dist)

est = estimate_log_intersection(space, [a1, a2], 1e-4)
print("estimate %.8f (%s, K = %d)" % (est.value, est.guarantee.value, est.K_used))


# Now make the events rare: attach a third coordinate that is 1 with
# probability 1e-8 to both events.  Each event now passes its threshold.

r = Fraction(1, 10**8)
rare = CoordinateSpace("rare", (0, 1), (1 - r, r))
space = ProductSpace((bit, bit, rare))
events = [Event.from_tuples(space, "A1", [0, 2], [(1, 1)]),
          Event.from_tuples(space, "A2", [0, 1, 2], [(1, 1, 1)])]

exact = exact_intersection_probability(space, events)
for eps in (1e-2, 1e-6, 1e-10):
    est = estimate_log_intersection(space, events, eps)
    err = abs(est.log_value - math.log(exact))
    print("eps %-6g K %-4d %s  log error %.2e" % (eps, est.K_used, est.guarantee.value, err))
