"""
Splitting a decision's payout among binned examples
===================================================

A decision rule looks up the query's bin, counts the labels it finds there,
and acts.  When the action pays (or costs) money, each example in the bin can
be paid its exact average marginal contribution over all join orders -- in
closed form, without touching a single permutation.
"""

from fractions import Fraction

from divvy import (
    Dataset,
    Example,
    MajorityValueFunction,
    Query,
    critical_set,
    shapley_frequency_report,
    tally_bin,
)

# Three examples share the query's bin: two say the query's label is right,
# one disagrees.  Acting on the majority earns 100 when correct and loses 500
# when wrong; an empty bin means no action and no payout.
dataset = Dataset([
    Example(0, "buy", bin="volatile"),
    Example(1, "buy", bin="volatile"),
    Example(2, "sell", bin="volatile"),
])
payout = MajorityValueFunction(Fraction(100), Fraction(-500), Fraction(0))
query = Query(label="buy", bin="volatile")

tally = tally_bin(dataset, "volatile", query.label)
print(f"bin tally: {tally.n_match} matching / {tally.n_mismatch} mismatching")
print(f"payout with everyone present: {payout.value(tally.n_match, tally.n_mismatch)}")

report = shapley_frequency_report(dataset, [query], payout, mode="exact")
for row in report.examples:
    print(f"  example {row.id}: {row.value}")
# The two agreeing examples split credit equally (150 each); the dissenter is
# charged 200.  The three numbers add up to the full payout of 100: values
# never create or destroy money.
total = sum(report.values().values())
print(f"sum of values: {total}")

# Where do those numbers come from?  Only tallies where one more vote flips
# the action's value matter -- the "critical" tallies.  For a matching
# example they sit on two diagonals around a tie:
print("\ncritical (match, mismatch) tallies for a matching example:")
crit = critical_set(payout, tally.n_match - 1, tally.n_mismatch, True)
for a, b, delta in crit.entries:
    print(f"  at ({a}, {b}) joining changes the payout by {delta}")

# Float mode gives the same split at scale; exact mode is plain fractions.
approx = shapley_frequency_report(dataset, [query], payout, mode="float")
print("\nfloat mode:", {r.id: round(r.value, 12) for r in approx.examples})
