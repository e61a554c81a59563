"""Exact Shapley payouts for a k-nearest-neighbor majority vote.

Each example's value splits into a creation term (the example arrives as
the k-th member and casts the deciding pattern) and a change term (the
example arrives later and knocks the current k-th voter out).  The change
terms over all examples share one reverse sweep down the distance ranking,
so a whole query costs O(n log n) for the sort plus O(n) arithmetic.
"""

from __future__ import annotations

import time
from fractions import Fraction
from typing import List, Sequence

import numpy as np
from scipy.special import gammaln

from .combinatorics import EXACT, Money, check_mode, precede_probability
from .errors import InputError
from .model import (
    Dataset,
    KnnConfig,
    OutcomeValues,
    Query,
    RankedNeighborhood,
    rank_by_distance,
    to_money,
)
from .report import ValueReport, assemble_report

METHOD = "shapley-knn"


def knn_creation_value(
    n: int,
    match_others: int,
    label_matches: bool,
    k: int,
    ov: OutcomeValues,
    mode: str = "float",
) -> Money:
    """Creation term: expected payoff from the permutations where the
    example is the k-th to arrive.

    ``match_others`` counts the examples other than this one whose label
    matches the query.  Returns 0 when n < k: the k-th position never
    exists, so the example can neither complete nor change a vote.
    """
    check_mode(mode)
    if n < 1 or match_others < 0 or match_others > n - 1:
        raise InputError("inconsistent creation-term counts")
    if n < k:
        return to_money(0, mode)
    size_a = match_others
    size_b = n - 1 - match_others
    half = (k - 1) // 2
    wrong_top = half - (1 if label_matches else 0)
    total = to_money(0, mode)
    for a in range(0, k):
        w = precede_probability((size_a, size_b), (a, k - 1 - a), mode)
        outcome = ov.wrong if a <= wrong_top else ov.correct
        total += w * to_money(outcome, mode)
    return total - to_money(ov.none, mode) / n


def _change_term(a_j: int, b_j: int, u_matches: bool, half: int, k: int, mode: str) -> Money:
    """One sweep term: probability that the example at a rank with prefix
    counts (a_j, b_j) is the pivotal k-th voter displaced by a nearer
    example of the other class.

    A prefix holding no example of the nearer one's class can never pair
    up; the sweep still asks, so answer zero rather than treat it as a
    malformed probability query."""
    size_a = a_j - (1 if u_matches else 0)
    size_b = b_j - (0 if u_matches else 1)
    if size_a < 0 or size_b < 0:
        return to_money(0, mode)
    return precede_probability((size_a, size_b, 1), (half, half, 1), mode)


def knn_change_values_all(
    ranking: RankedNeighborhood,
    k: int,
    ov: OutcomeValues,
    mode: str = "float",
) -> List[Money]:
    """Change term for every example, indexed by rank position.

    Position i's term sums over the strictly farther positions with the
    opposite label; accumulating the shared suffix once per label class
    turns the quadratic double loop into one reverse sweep.
    """
    check_mode(mode)
    if k < 1 or k % 2 == 0:
        raise InputError("k must be odd")
    n = len(ranking)
    half = (k - 1) // 2
    if mode == EXACT:
        ovx = ov.as_fractions()
        deltas = {True: ovx.correct - ovx.wrong, False: ovx.wrong - ovx.correct}
        suffix = {True: Fraction(0), False: Fraction(0)}
        out: List[Money] = [Fraction(0)] * n
        for pos in range(n - 1, -1, -1):
            m = bool(ranking.matches[pos])
            out[pos] = suffix[m]
            # this position becomes a "farther j" for everything nearer
            a_j = int(ranking.prefix_match[pos])
            b_j = int(ranking.prefix_mismatch[pos])
            u = not m  # only the opposite class collects a term at j = pos
            suffix[u] += _change_term(a_j, b_j, u, half, k, EXACT) * deltas[u]
        return out
    return list(_change_values_float(ranking, k, ov))


def _log_binom_arr(n_arr: np.ndarray, r: int) -> np.ndarray:
    """Vectorized ln C(n, r) with -inf where the zero convention applies."""
    n_arr = n_arr.astype(float)
    out = np.full(n_arr.shape, -np.inf)
    ok = n_arr >= r
    if r >= 0:
        nv = n_arr[ok]
        out[ok] = gammaln(nv + 1.0) - gammaln(r + 1.0) - gammaln(nv - r + 1.0)
    return out


def _change_values_float(ranking: RankedNeighborhood, k: int, ov: OutcomeValues) -> np.ndarray:
    n = len(ranking)
    half = (k - 1) // 2
    a = ranking.prefix_match.astype(np.int64)
    b = ranking.prefix_mismatch.astype(np.int64)
    j_tot = a + b
    vals = np.zeros(n)
    matches = ranking.matches
    delta = {True: float(ov.correct) - float(ov.wrong)}
    delta[False] = -delta[True]
    suffixes = {}
    with np.errstate(invalid="ignore"):
        for u in (True, False):
            size_a = a - (1 if u else 0)
            size_b = b - (0 if u else 1)
            log_w = (
                _log_binom_arr(size_a, half)
                + _log_binom_arr(size_b, half)
                - _log_binom_arr(j_tot, k)
                - np.log(j_tot + 1.0)
            )
            term = np.where(np.isfinite(log_w), np.exp(log_w), 0.0)
            term[matches == u] = 0.0  # only opposite-class positions contribute
            term *= delta[u]
            suffix_incl = np.cumsum(term[::-1])[::-1]
            suffixes[u] = suffix_incl - term
    vals = np.where(matches, suffixes[True], suffixes[False])
    return vals


def knn_shapley_values(
    dataset: Dataset,
    query: Query,
    config: KnnConfig,
    mode: str = "float",
) -> dict:
    """Shapley value per example id for a single query."""
    check_mode(mode)
    ranking = rank_by_distance(dataset, query.features, query.label, config.metric)
    n = len(dataset)
    k = config.k
    ov = config.outcome_values
    if n < k:
        return {ex.id: to_money(0, mode) for ex in dataset}
    total_match = int(ranking.matches.sum())
    f = {}
    for u in (True, False):
        others = total_match - 1 if u else total_match
        if 0 <= others <= n - 1:
            f[u] = knn_creation_value(n, others, u, k, ov, mode)
    g = knn_change_values_all(ranking, k, ov, mode)
    out = {}
    for pos in range(n):
        u = bool(ranking.matches[pos])
        out[int(ranking.ordering[pos])] = f[u] + g[pos]
    return out


def knn_shapley_report(
    dataset: Dataset,
    queries: Sequence[Query],
    config: KnnConfig,
    mode: str = "float",
    per_query: bool = False,
) -> ValueReport:
    """Total Shapley payout per example over a batch of queries."""
    check_mode(mode)
    t0 = time.perf_counter()
    n = len(dataset)
    rows = []
    if mode == EXACT:
        totals = {ex.id: Fraction(0) for ex in dataset}
        for q in queries:
            values = knn_shapley_values(dataset, q, config, mode)
            for i, v in values.items():
                totals[i] += v
            if per_query:
                rows.append(values)
    else:
        # float path stays in arrays aligned to dataset order
        ids = dataset.ids
        contiguous = ids == list(range(n))
        row_of = None if contiguous else {i: r for r, i in enumerate(ids)}
        acc = np.zeros(n)
        for q in queries:
            ranking = rank_by_distance(dataset, q.features, q.label, config.metric)
            if n < config.k:
                vals_pos = np.zeros(n)
            else:
                vals_pos = _change_values_float(ranking, config.k, config.outcome_values)
                total_match = int(ranking.matches.sum())
                for u in (True, False):
                    others = total_match - 1 if u else total_match
                    if 0 <= others <= n - 1:
                        fv = knn_creation_value(n, others, u, config.k, config.outcome_values, mode)
                        vals_pos = vals_pos + np.where(ranking.matches == u, fv, 0.0)
            if contiguous:
                dest = ranking.ordering
            else:
                dest = np.fromiter(
                    (row_of[int(i)] for i in ranking.ordering), count=n, dtype=np.int64
                )
            arr = np.zeros(n)
            arr[dest] = vals_pos
            acc += arr
            if per_query:
                rows.append({ids[r]: float(arr[r]) for r in range(n)})
        totals = {ids[r]: float(acc[r]) for r in range(n)}
    return assemble_report(
        method=METHOD,
        mode=mode,
        dataset=dataset,
        totals=totals,
        query_count=len(queries),
        wall_time=time.perf_counter() - t0,
        k=config.k,
        per_query=rows if per_query else None,
    )
