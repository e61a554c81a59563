"""Owen values for k-NN votes: the layered DP and the full report path."""

import random
from fractions import Fraction

from divvy import (
    Dataset,
    Example,
    KnnConfig,
    OutcomeValues,
    Query,
    exact_owen_all,
    knn_game,
    knn_owen_change,
    knn_owen_creation,
    knn_owen_distribution,
    knn_owen_report,
    knn_shapley_values,
    knn_subset_value,
    rank_by_distance,
)

from conftest import random_knn_instance, relative_gap

UNIT = OutcomeValues(Fraction(1), Fraction(-1), Fraction(0))


def test_distribution_mass_by_base():
    others = [(1, 0), (0, 2), (1, 1)]
    q = knn_owen_distribution(others, base="target")
    assert sum(q.values()) == 1
    q = knn_owen_distribution(others, base="first", first_counts=(1, 0))
    assert sum(q.values()) == Fraction(1, 2), (
        "pinning the pivot's coalition first leaves only the orderings "
        "where it precedes the target"
    )


def test_distribution_empty_cases():
    assert knn_owen_distribution([]) == {(0, 0): Fraction(1)}
    q = knn_owen_distribution([], base="first", first_counts=(2, 1))
    assert q == {(2, 1): Fraction(1, 2)}


def test_distribution_caps_keep_in_range_states():
    others = [(2, 0), (0, 2), (1, 1)]
    for base, first in (("target", None), ("first", (1, 1))):
        full = knn_owen_distribution(others, base=base, first_counts=first)
        capped = knn_owen_distribution(others, base=base, first_counts=first, caps=(1, 1))
        for (a, b), p in capped.items():
            assert a <= 1 and b <= 1
            assert p == full[(a, b)], (base, a, b)


def test_distribution_caps_drop_oversized_first():
    q = knn_owen_distribution([(1, 0)], base="first", first_counts=(3, 0), caps=(1, 1))
    assert q == {}


def test_creation_plus_change_decomposition():
    rng = random.Random(61)
    dataset, query, config = random_knn_instance(
        rng, max_n=6, ks=(1, 3), with_coalitions=True
    )
    cs = dataset.coalition_structure()
    ranking = rank_by_distance(dataset, query.features, query.label)
    rep = knn_owen_report(dataset, cs, [query], config, mode="exact")
    for ex in dataset:
        f = knn_owen_creation(ranking, cs, ex.id, config.k, config.outcome_values, "exact")
        g = knn_owen_change(ranking, cs, ex.id, config.k, config.outcome_values, "exact")
        assert rep.value_of(ex.id) == f + g


def test_report_matches_oracle():
    rng = random.Random(62)
    for trial in range(50):
        dataset, query, config = random_knn_instance(
            rng, max_n=6, ks=(1, 3), with_coalitions=True, max_groups=3
        )
        cs = dataset.coalition_structure()
        game = knn_game(dataset, query, config)
        want = exact_owen_all(game, cs)
        rep = knn_owen_report(dataset, cs, [query], config, mode="exact")
        assert rep.values() == want, trial


def test_singleton_coalitions_reduce_to_shapley():
    rng = random.Random(63)
    for _ in range(20):
        dataset, query, config = random_knn_instance(rng, max_n=7, ks=(1, 3, 5))
        singles = Dataset(
            Example(ex.id, ex.label, features=ex.features, coalition=f"s{ex.id}")
            for ex in dataset
        )
        shap = knn_shapley_values(dataset, query, config, mode="exact")
        rep = knn_owen_report(singles, singles.coalition_structure(), [query], config, mode="exact")
        assert rep.values() == shap


def test_grand_coalition_reduces_to_shapley():
    rng = random.Random(64)
    for _ in range(20):
        dataset, query, config = random_knn_instance(rng, max_n=7, ks=(1, 3, 5))
        grand = Dataset(
            Example(ex.id, ex.label, features=ex.features, coalition="all")
            for ex in dataset
        )
        shap = knn_shapley_values(dataset, query, config, mode="exact")
        rep = knn_owen_report(grand, grand.coalition_structure(), [query], config, mode="exact")
        assert rep.values() == shap


def test_efficiency():
    rng = random.Random(65)
    for _ in range(25):
        dataset, query, config = random_knn_instance(
            rng, max_n=7, ks=(1, 3), with_coalitions=True
        )
        cs = dataset.coalition_structure()
        rep = knn_owen_report(dataset, cs, [query], config, mode="exact")
        r = rank_by_distance(dataset, query.features, query.label)
        v_full = knn_subset_value(dataset.ids, r, config.k, config.outcome_values)
        v_empty = knn_subset_value([], r, config.k, config.outcome_values)
        assert sum(rep.values().values()) == Fraction(v_full) - Fraction(v_empty)


def test_float_tracks_exact():
    rng = random.Random(66)
    for _ in range(25):
        dataset, query, config = random_knn_instance(
            rng, max_n=7, ks=(1, 3), with_coalitions=True
        )
        cs = dataset.coalition_structure()
        exact = knn_owen_report(dataset, cs, [query], config, mode="exact")
        approx = knn_owen_report(dataset, cs, [query], config, mode="float")
        for i, v in exact.values().items():
            assert relative_gap(float(v), approx.value_of(i)) < 1e-9, i


def test_dp_cache_changes_nothing():
    rng = random.Random(67)
    for _ in range(10):
        dataset, query, config = random_knn_instance(
            rng, max_n=7, ks=(3,), with_coalitions=True
        )
        cs = dataset.coalition_structure()
        for mode in ("exact", "float"):
            hot = knn_owen_report(dataset, cs, [query], config, mode=mode, use_cache=True)
            cold = knn_owen_report(dataset, cs, [query], config, mode=mode, use_cache=False)
            assert hot.values() == cold.values()


def test_worked_example_two_points():
    ds = Dataset([
        Example(0, "pos", features=(0.0,), coalition="c0"),
        Example(1, "neg", features=(2.0,), coalition="c1"),
    ])
    q = Query(label="pos", features=(0.5,))
    rep = knn_owen_report(ds, ds.coalition_structure(), [q], KnnConfig(1, UNIT), mode="exact")
    assert rep.values() == {0: Fraction(3, 2), 1: Fraction(-1, 2)}
