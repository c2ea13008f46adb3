"""Disguise probabilities: exact enumeration and correlation-based lower bounds.

An item is disguised in a test when some *other* member of that test is
defective, and totally disguised when that holds for every test containing
it; a totally disguised item's own status leaves no trace in the outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import bounds
from .design import TestDesign, _bit_positions
from .errors import BudgetExceededError
from .model import Prior

CO_ITEM_BUDGET = 25
_CHUNK = 1 << 20

_POP16: np.ndarray | None = None


@dataclass(frozen=True)
class ItemDisguise:
    """Per-item disguise numbers: log bound, its exponential, optional exact value."""

    item: int
    log_bound: float
    fkg_bound: float
    exact_prob: float | None

    def to_dict(self) -> dict:
        return {
            "item": self.item,
            "log_bound": self.log_bound,
            "fkg_bound": self.fkg_bound,
            "exact_prob": self.exact_prob,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ItemDisguise:
        return cls(data["item"], data["log_bound"], data["fkg_bound"], data.get("exact_prob"))


@dataclass(frozen=True)
class DisguiseReport:
    """All per-item disguise bounds plus the averaged-bound inequality chain.

    ``mean_log_bound`` averages the per-item log bounds; the same quantity
    recomputed test-by-test is kept alongside as a cross-check.  When the
    chain applies (T <= n, all weights >= 2) the values satisfy
    mean >= scaled_min_term >= min_weight_term >= l_star.
    """

    items: tuple[ItemDisguise, ...]
    mean_log_bound: float
    mean_log_bound_by_test: float
    min_weight_term: float | None
    scaled_min_term: float | None
    l_star: float
    chain_applicable: bool

    def to_dict(self) -> dict:
        return {
            "items": [it.to_dict() for it in self.items],
            "mean_log_bound": self.mean_log_bound,
            "mean_log_bound_by_test": self.mean_log_bound_by_test,
            "min_weight_term": self.min_weight_term,
            "scaled_min_term": self.scaled_min_term,
            "l_star": self.l_star,
            "chain_applicable": self.chain_applicable,
        }

    @classmethod
    def from_dict(cls, data: dict) -> DisguiseReport:
        return cls(
            items=tuple(ItemDisguise.from_dict(d) for d in data["items"]),
            mean_log_bound=data["mean_log_bound"],
            mean_log_bound_by_test=data["mean_log_bound_by_test"],
            min_weight_term=data.get("min_weight_term"),
            scaled_min_term=data.get("scaled_min_term"),
            l_star=data["l_star"],
            chain_applicable=data["chain_applicable"],
        )


def _check_item(design: TestDesign, i: int) -> None:
    if not 0 <= i < design.n:
        raise ValueError(f"item index {i} outside [0, {design.n})")


def _log_disguise_term(q: float, w: int) -> float:
    # ln(1 - q^(w-1)); a weight-1 test can never disguise its only member.
    if w <= 1:
        return float("-inf")
    return math.log1p(-(q ** (w - 1)))


def co_items(design: TestDesign, i: int) -> tuple[int, ...]:
    """Items sharing at least one test with item ``i``."""
    _check_item(design, i)
    union = 0
    for m in design.row_masks:
        if m >> i & 1:
            union |= m
    return _bit_positions(union & ~(1 << i))


def disguise_bound(design: TestDesign, i: int, prior: Prior) -> tuple[float, float]:
    """Log product bound and its exponential for item i being totally disguised.

    Disguise events across tests are increasing in the defective set, so they
    are positively correlated (FKG), which makes the product of the per-test
    probabilities 1 - q^(w-1) a lower bound on the joint probability.  A
    weight-1 test contributes ln(0) = -inf, i.e. a bound of exactly 0.
    """
    _check_item(design, i)
    total = 0.0
    for t, m in enumerate(design.row_masks):
        if m >> i & 1:
            total += _log_disguise_term(prior.q, design.weights[t])
    return total, math.exp(total)


def _pop16() -> np.ndarray:
    global _POP16
    if _POP16 is None:
        table = np.zeros(1, dtype=np.uint8)
        while table.size < 1 << 16:
            table = np.concatenate([table, table + 1])
        _POP16 = table
    return _POP16


@lru_cache(maxsize=16384)
def _pattern_counts(design: TestDesign, i: int) -> tuple[int, ...]:
    """Count, by defective count j, the co-item patterns that totally disguise i.

    Enumerates all 2^m defectivity patterns of the m items sharing a test with
    item i (items outside those tests cannot affect the event) and tallies the
    patterns in which every test containing i holds a defective other than i.
    """
    co = co_items(design, i)
    positions = {item: j for j, item in enumerate(co)}
    m = len(co)
    if m > CO_ITEM_BUDGET:
        raise BudgetExceededError(
            f"item {i} shares tests with {m} items, over the enumeration budget of {CO_ITEM_BUDGET}"
        )
    submasks = []
    for mask in design.row_masks:
        if mask >> i & 1:
            sub = 0
            for other in _bit_positions(mask & ~(1 << i)):
                sub |= 1 << positions[other]
            submasks.append(sub)

    counts = np.zeros(m + 1, dtype=np.int64)
    pop = _pop16()
    for start in range(0, 1 << m, _CHUNK):
        stop = min(start + _CHUNK, 1 << m)
        patterns = np.arange(start, stop, dtype=np.uint32)
        ok = np.ones(patterns.size, dtype=bool)
        for sub in submasks:
            ok &= (patterns & np.uint32(sub)) != 0
        popcounts = (pop[patterns & 0xFFFF] + pop[patterns >> 16]).astype(np.intp)
        counts += np.bincount(popcounts[ok], minlength=m + 1)
    return tuple(int(c) for c in counts)


def exact_disguise_prob(design: TestDesign, i: int, prior: Prior) -> float:
    """Exact probability that item i is totally disguised, by brute enumeration."""
    _check_item(design, i)
    counts = _pattern_counts(design, i)
    m = len(counts) - 1
    return float(sum(c * prior.weight(j, m) for j, c in enumerate(counts) if c))


def mean_log_bound(
    design: TestDesign, prior: Prior, exact_budget: int | None = None
) -> DisguiseReport:
    """Per-item disguise bounds plus the averaged-bound chain values.

    The item-averaged log bound is also recomputed by summing over tests
    (weight w contributes w * ln(1 - q^(w-1))); the two must agree.  When
    ``exact_budget`` is given, items whose co-item count fits the budget also
    get their exact disguise probability.
    """
    n = design.n
    items = []
    for i in range(n):
        log_b, fkg_b = disguise_bound(design, i, prior)
        exact = None
        if exact_budget is not None and len(co_items(design, i)) <= min(
            exact_budget, CO_ITEM_BUDGET
        ):
            exact = exact_disguise_prob(design, i, prior)
        items.append(ItemDisguise(item=i, log_bound=log_b, fkg_bound=fkg_b, exact_prob=exact))

    mean_items = sum(it.log_bound for it in items) / n if n else 0.0
    per_test = [w * _log_disguise_term(prior.q, w) for w in design.weights if w >= 1]
    mean_tests = sum(per_test) / n if n else 0.0
    min_term = min(per_test) if per_test else None
    scaled = (design.T / n) * min_term if (min_term is not None and n) else None
    ls, _ = bounds.l_star(prior)
    applicable = design.T <= n and all(w >= 2 for w in design.weights)
    return DisguiseReport(
        items=tuple(items),
        mean_log_bound=mean_items,
        mean_log_bound_by_test=mean_tests,
        min_weight_term=min_term,
        scaled_min_term=scaled,
        l_star=ls,
        chain_applicable=applicable,
    )
