# Counting points of {0, 1, 2}^12 that satisfy a few linear constraints.
#
# Every constraint turns into a bad event "constraint fails".  With 3 values
# per coordinate a lone event only clears the 1/3375 threshold when its
# failure set is tiny, so the systems below have one tight constraint and a
# few slack ones.

from intersectprob.counting import count_integer_points

def plus(lo, hi):
    return " + ".join("x[%d]" % i for i in range(lo, hi + 1))

systems = {
    "eight-term sum": [plus(1, 8) + " <= 15", "x[9] + x[10] <= 4"],
    "ten-term sum": [plus(1, 10) + " <= 18", "x[11] + x[12] <= 4"],
    "full sum": [plus(1, 12) + " <= 22"],
    "forbidden corner": ["not (" + " and ".join("x[%d] == 2" % i for i in range(2, 11)) + ")"],
    "too loose": [plus(1, 6) + " <= 10"],
}

for name, constraints in systems.items():
    res = count_integer_points(constraints, 2, 12, 1e-2)
    print("%-17s estimate %12.3f  exact %7d  (%s)" % (name, res.estimate, res.exact, res.result.guarantee.value))


# The loose system fails the condition: its bad event has probability
# 7/729, far above 1/3375.  The estimate is still printed, only without a
# guarantee.  Its condition table says why.

res = count_integer_points(systems["too loose"], 2, 12, 1e-2)
for row in res.result.conditions.rows:
    print(row.name, row.probability, "threshold", row.threshold, "pass" if row.passes else "fail")
