"""
Trust, but enumerate
====================

The closed-form routines are fast because they never look at permutations.
The oracle does the opposite: it walks every join order (or samples them)
against the raw coalition value function.  On small instances the two must
agree to the last digit -- a useful habit before trusting any large run.
"""

import random
from fractions import Fraction

from divvy import (
    Dataset,
    Example,
    KnnConfig,
    OutcomeValues,
    Query,
    exact_shapley_all,
    knn_game,
    knn_shapley_values,
    mc_shapley,
)

rng = random.Random(1234)

print("closed form vs. full enumeration on random 6-point instances:")
for trial in range(5):
    pts = [(rng.uniform(-1, 1),) for _ in range(6)]
    labels = [rng.choice(["a", "b"]) for _ in range(6)]
    dataset = Dataset(
        Example(i, labels[i], features=pts[i]) for i in range(6)
    )
    query = Query(label="a", features=(rng.uniform(-1, 1),))
    config = KnnConfig(3, OutcomeValues(Fraction(4), Fraction(-2), Fraction(0)))

    fast = knn_shapley_values(dataset, query, config, mode="exact")
    game = knn_game(dataset, query, config)
    slow = exact_shapley_all(game)  # 6! = 720 join orders
    print(f"  trial {trial}: identical = {fast == slow}")

# Monte Carlo closes in on the same numbers with a standard error that
# shrinks like 1/sqrt(samples).
pts = [(rng.uniform(-1, 1),) for _ in range(8)]
labels = [rng.choice(["a", "b"]) for _ in range(8)]
dataset = Dataset(Example(i, labels[i], features=pts[i]) for i in range(8))
query = Query(label="a", features=(0.0,))
config = KnnConfig(3, OutcomeValues(Fraction(4), Fraction(-2), Fraction(0)))
game = knn_game(dataset, query, config)
truth = exact_shapley_all(game)

print("\nsampling the join orders instead (player 0):")
print(f"  exact value: {truth[0]} = {float(truth[0]):.6f}")
for samples in (100, 1_000, 10_000):
    est = mc_shapley(game, 0, samples, seed=99)
    gap = abs(est.estimate - float(truth[0]))
    print(f"  {samples:>6} samples: {est.estimate:+.6f} "
          f"(off by {gap:.2e}, reported se {est.standard_error:.2e})")
