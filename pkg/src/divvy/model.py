"""Dataset containers, value functions, and the small pieces of game
mechanics (bin tallies, distance rankings, subset votes) that the payout
formulas are written against.

Labels are opaque symbols; at most two distinct ones may appear across a
dataset plus the query being scored.  Bins are opaque too.  Example ids are
non-negative integers and unique.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, InputError, MissingValueError

Label = Hashable
Numeric = Union[int, float, Fraction]


@dataclass(frozen=True)
class Example:
    """One in-sample example.  ``bin`` is used by the frequency model,
    ``features`` by the k-NN model; either may be absent."""

    id: int
    label: Label
    bin: Optional[Hashable] = None
    features: Optional[tuple] = None
    coalition: Optional[Hashable] = None

    def __post_init__(self):
        if not isinstance(self.id, (int, np.integer)) or self.id < 0:
            raise InputError(f"example id must be a non-negative integer, got {self.id!r}")


@dataclass(frozen=True)
class Query:
    """An out-of-sample observation with its realized label.

    ``value_function`` optionally overrides the run-wide frequency value
    function for this query alone.
    """

    label: Label
    bin: Optional[Hashable] = None
    features: Optional[tuple] = None
    value_function: Optional["FrequencyValueFunction"] = None


class Dataset:
    """A validated list of examples."""

    def __init__(self, examples: Iterable[Example]):
        self.examples = list(examples)
        seen = set()
        for ex in self.examples:
            if ex.id in seen:
                raise InputError(f"duplicate example id {ex.id}")
            seen.add(ex.id)
        labels = sorted({str(ex.label) for ex in self.examples})
        if len(labels) > 2:
            raise InputError(
                f"labels must be binary; found a third symbol {labels[2]!r}"
            )
        self._labels = {ex.label for ex in self.examples}
        self._features = None

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def ids(self) -> list:
        return [ex.id for ex in self.examples]

    @property
    def labels(self) -> set:
        return set(self._labels)

    def check_query_label(self, label: Label) -> None:
        if label not in self._labels and len(self._labels) >= 2:
            raise InputError(
                f"query label {label!r} is a third symbol; dataset labels are {sorted(map(str, self._labels))}"
            )

    def bins(self) -> set:
        return {ex.bin for ex in self.examples}

    def require_bins(self) -> None:
        missing = [ex.id for ex in self.examples if ex.bin is None]
        if missing:
            raise InputError(f"examples {missing[:5]} have no bin; frequency methods need one")

    def by_bin(self, bin_id: Hashable) -> list:
        return [ex for ex in self.examples if ex.bin == bin_id]

    def feature_matrix(self) -> np.ndarray:
        """All feature rows as a float array; validates presence and shape."""
        if self._features is None:
            dims = set()
            for ex in self.examples:
                if ex.features is None:
                    raise InputError(f"example {ex.id} has no features; k-NN methods need them")
                dims.add(len(ex.features))
            if len(dims) > 1:
                raise InputError(f"feature dimensions are ragged: {sorted(dims)}")
            self._features = np.asarray(
                [ex.features for ex in self.examples], dtype=float
            )
        return self._features

    def coalition_structure(self) -> "CoalitionStructure":
        missing = [ex.id for ex in self.examples if ex.coalition is None]
        if missing:
            raise InputError(
                f"examples {missing[:5]} carry no coalition id; Owen methods need a full partition"
            )
        groups: dict = {}
        for ex in self.examples:
            groups.setdefault(ex.coalition, set()).add(ex.id)
        return CoalitionStructure({cid: frozenset(ids) for cid, ids in groups.items()})


@dataclass(frozen=True)
class CoalitionStructure:
    """A partition of example ids into named coalitions."""

    members: Mapping[Hashable, frozenset]

    def __post_init__(self):
        seen: dict = {}
        for cid, ids in self.members.items():
            for i in ids:
                if i in seen:
                    raise InputError(
                        f"example {i} appears in coalitions {seen[i]!r} and {cid!r}"
                    )
                seen[i] = cid
        object.__setattr__(self, "_owner", seen)

    def coalition_of(self, example_id: int) -> Hashable:
        try:
            return self._owner[example_id]
        except KeyError:
            raise InputError(f"example {example_id} belongs to no coalition") from None

    def coalition_ids(self) -> list:
        return sorted(self.members.keys(), key=str)

    def validate_partition(self, ids: Iterable[int]) -> None:
        ids = set(ids)
        covered = set(self._owner)
        if ids - covered:
            raise InputError(f"examples {sorted(ids - covered)[:5]} are missing from the coalition partition")
        if covered - ids:
            raise InputError(f"coalition partition names unknown example ids {sorted(covered - ids)[:5]}")


# ---------------------------------------------------------------------------
# frequency model: value functions over (match, mismatch) count pairs


def _require_count(name: str, v: int) -> None:
    if not isinstance(v, (int, np.integer)) or v < 0:
        raise InputError(f"{name} must be a non-negative integer, got {v!r}")


class FrequencyValueFunction:
    """Maps a count pair (a matches, b mismatches) to money."""

    def value(self, a: int, b: int) -> Numeric:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class MajorityValueFunction(FrequencyValueFunction):
    """Pays ``correct`` when matches outnumber mismatches, ``wrong`` when they
    trail, ``none`` on a tie (including the empty bin)."""

    correct: Numeric
    wrong: Numeric
    none: Numeric

    def value(self, a: int, b: int) -> Numeric:
        _require_count("a", a)
        _require_count("b", b)
        if a > b:
            return self.correct
        if a < b:
            return self.wrong
        return self.none


@dataclass(frozen=True)
class TableValueFunction(FrequencyValueFunction):
    """Explicit (a, b) -> money table with an optional default."""

    entries: Mapping[tuple, Numeric]
    default: Optional[Numeric] = None

    def __post_init__(self):
        if (0, 0) not in self.entries and self.default is None:
            raise InputError("table value function must define v(0, 0) or a default")

    def value(self, a: int, b: int) -> Numeric:
        _require_count("a", a)
        _require_count("b", b)
        v = self.entries.get((a, b), self.default)
        if v is None:
            raise MissingValueError(f"value table has no entry for ({a}, {b}) and no default")
        return v


def frequency_value(vf: FrequencyValueFunction, a: int, b: int) -> Numeric:
    """Value of a bin holding a matching and b mismatching examples."""
    return vf.value(a, b)


def delta_value(vf: FrequencyValueFunction, a: int, b: int, label_matches: bool) -> Numeric:
    """Marginal change from adding one example of the given label class to a
    bin already holding (a, b)."""
    if label_matches:
        return vf.value(a + 1, b) - vf.value(a, b)
    return vf.value(a, b + 1) - vf.value(a, b)


@dataclass(frozen=True)
class BinTally:
    """Counts of matching / mismatching examples inside one bin, relative to
    a particular query label."""

    n_match: int
    n_mismatch: int

    def __post_init__(self):
        _require_count("n_match", self.n_match)
        _require_count("n_mismatch", self.n_mismatch)

    @property
    def n(self) -> int:
        return self.n_match + self.n_mismatch


def tally_bin(dataset: Dataset, bin_id: Hashable, query_label: Label) -> BinTally:
    """Tally the examples of one bin against the query label."""
    dataset.check_query_label(query_label)
    a = b = 0
    for ex in dataset.by_bin(bin_id):
        if ex.label == query_label:
            a += 1
        else:
            b += 1
    return BinTally(a, b)


# ---------------------------------------------------------------------------
# k-NN model: rankings and subset votes


@dataclass(frozen=True)
class OutcomeValues:
    """Money attached to a k-NN vote on one query: correct majority, wrong
    majority, or fewer than k voters present."""

    correct: Numeric
    wrong: Numeric
    none: Numeric

    def as_fractions(self) -> "OutcomeValues":
        return OutcomeValues(Fraction(self.correct), Fraction(self.wrong), Fraction(self.none))


@dataclass(frozen=True)
class KnnConfig:
    k: int
    outcome_values: OutcomeValues
    metric: Union[str, Callable] = "euclidean"

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ConfigError(f"k must be a positive integer, got {self.k!r}")
        if self.k % 2 == 0:
            raise ConfigError("k must be odd")


@dataclass(frozen=True)
class RankedNeighborhood:
    """Examples sorted by ascending distance to one query (ties broken by
    ascending id), with prefix label counts relative to the query label.

    ``prefix_match[j]`` / ``prefix_mismatch[j]`` count examples strictly
    before rank position j (0-based), so position 0 has counts (0, 0) and
    the two arrays always sum to the position index.
    """

    ordering: np.ndarray        # example ids, nearest first
    matches: np.ndarray         # bool, label == query label, by position
    prefix_match: np.ndarray    # int, by position
    prefix_mismatch: np.ndarray

    def __len__(self):
        return len(self.ordering)

    def position_of(self, example_id: int) -> int:
        hits = np.nonzero(self.ordering == example_id)[0]
        if len(hits) == 0:
            raise InputError(f"example {example_id} is not in this ranking")
        return int(hits[0])


def rank_by_distance(
    dataset: Dataset,
    query_features: Sequence[float],
    query_label: Label,
    metric: Union[str, Callable] = "euclidean",
) -> RankedNeighborhood:
    """Rank the whole dataset by distance to the query point.

    The metric is any real-valued function of two feature vectors (no
    symmetry or triangle inequality assumed); "euclidean" selects the
    built-in vectorized one.  Equal distances fall back to ascending id,
    which keeps every downstream computation deterministic.
    """
    dataset.check_query_label(query_label)
    feats = dataset.feature_matrix()
    q = np.asarray(tuple(query_features), dtype=float)
    if feats.shape[0] and q.shape[0] != feats.shape[1]:
        raise InputError(
            f"query has {q.shape[0]} features but the dataset has {feats.shape[1]}"
        )
    if metric == "euclidean":
        dist = np.sqrt(((feats - q) ** 2).sum(axis=1))
    elif callable(metric):
        dist = np.asarray([float(metric(ex.features, tuple(q))) for ex in dataset], dtype=float)
    else:
        raise ConfigError(f"unknown metric {metric!r}")
    ids = np.asarray(dataset.ids, dtype=np.int64)
    order = np.lexsort((ids, dist))
    match_by_row = np.asarray([ex.label == query_label for ex in dataset], dtype=bool)
    matches = match_by_row[order]
    pm = np.zeros(len(order), dtype=np.int64)
    pmm = np.zeros(len(order), dtype=np.int64)
    if len(order) > 1:
        pm[1:] = np.cumsum(matches[:-1])
        pmm[1:] = np.cumsum(~matches[:-1])
    return RankedNeighborhood(ids[order], matches, pm, pmm)


def knn_subset_value(
    subset: Iterable[int],
    ranking: RankedNeighborhood,
    k: int,
    ov: OutcomeValues,
) -> Numeric:
    """Value of a coalition subset: majority vote of its k nearest members,
    ``none`` when it musters fewer than k."""
    if k < 1 or k % 2 == 0:
        raise ConfigError("k must be odd")
    subset = set(subset)
    votes = 0
    seen = 0
    for pos in range(len(ranking)):
        if int(ranking.ordering[pos]) in subset:
            votes += bool(ranking.matches[pos])
            seen += 1
            if seen == k:
                break
    if seen < k:
        return ov.none
    return ov.correct if 2 * votes > k else ov.wrong


def to_money(x: Numeric, mode: str):
    """Normalize a raw value to the numeric mode's representation.

    Floats convert to Fraction exactly (their binary expansion); the exact
    pipeline never invents rounding on its own.
    """
    return Fraction(x) if mode == "exact" else float(x)
