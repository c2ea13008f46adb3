"""Closed-form error floors and related scalar bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ScanLimitError
from .model import Prior

SCAN_CAP = 10**6


@dataclass(frozen=True)
class BoundReport:
    """Floor values for a given prior, with optional refinements."""

    p: float
    q: float
    l_star: float
    w_star: int
    epsilon: float
    delta: float | None = None
    epsilon_delta: float | None = None
    counting_bound: float | None = None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "l_star": self.l_star,
            "w_star": self.w_star,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "epsilon_delta": self.epsilon_delta,
            "counting_bound": self.counting_bound,
        }

    @classmethod
    def from_dict(cls, data: dict) -> BoundReport:
        return cls(
            p=data["p"],
            q=data["q"],
            l_star=data["l_star"],
            w_star=data["w_star"],
            epsilon=data["epsilon"],
            delta=data.get("delta"),
            epsilon_delta=data.get("epsilon_delta"),
            counting_bound=data.get("counting_bound"),
        )


def weight_log_term(prior: Prior, w: int) -> float:
    """w * ln(1 - q^(w-1)): the weighted log chance a weight-w test disguises a member."""
    if w < 1:
        raise ValueError(f"test weight must be at least 1, got {w}")
    if w == 1:
        return float("-inf")
    return w * math.log1p(-(prior.q ** (w - 1)))


def l_star(prior: Prior) -> tuple[float, int]:
    """Minimum of w * ln(1 - q^(w-1)) over integer weights w >= 2, certified.

    Scans w = 2, 3, ... keeping the running minimum.  The scan stops once the
    tail majorant g(w) = w * q^(w-1) / (1 - q^(w-1)) sits below the running
    minimum's magnitude *and* is guaranteed to keep shrinking (w > q/p); from
    there no larger w can win, because |ln(1-x)| <= x/(1-x).  Ties go to the
    smaller weight.  Very small p pushes the certified stop beyond the hard
    cap of 10^6, which raises `ScanLimitError`.
    """
    q = prior.q
    monotone_from = q / (1.0 - q)
    best = weight_log_term(prior, 2)
    best_w = 2
    w = 2
    while True:
        w += 1
        if w > SCAN_CAP:
            raise ScanLimitError(
                f"certified scan not terminated by weight {SCAN_CAP} (p = {prior.p})"
            )
        qpow = q ** (w - 1)
        majorant = w * qpow / (1.0 - qpow)
        if w > monotone_from and majorant < -best:
            return best, best_w
        value = w * math.log1p(-qpow)
        if value < best:
            best, best_w = value, w


def epsilon_bound(prior: Prior) -> BoundReport:
    """The decoder-independent error floor min{p, q} * exp(L*) for T < n."""
    ls, ws = l_star(prior)
    eps = min(prior.p, prior.q) * math.exp(ls)
    return BoundReport(p=prior.p, q=prior.q, l_star=ls, w_star=ws, epsilon=eps)


def epsilon_bound_delta(prior: Prior, delta: float) -> float:
    """Sharper floor min{p, q} * exp((1 - delta) L*), valid when T < (1 - delta) n."""
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    ls, _ = l_star(prior)
    return min(prior.p, prior.q) * math.exp((1.0 - delta) * ls)


def counting_bound(prior: Prior, n: int) -> float:
    """Information-theoretic test requirement H(p) * n, in bits."""
    if n < 1:
        raise ValueError(f"item count must be at least 1, got {n}")
    p, q = prior.p, prior.q
    return n * (-p * math.log2(p) - q * math.log2(q))


def doubly_regular_disguise_bound(prior: Prior, l: int, r: int) -> float:
    """Disguise floor (1 - q^(r-1))^l for designs with l tests/item, r items/test."""
    if l < 1 or r < 1:
        raise ValueError("tests-per-item and items-per-test must be at least 1")
    return (1.0 - prior.q ** (r - 1)) ** l
