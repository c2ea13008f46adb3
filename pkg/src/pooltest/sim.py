"""Exact and Monte Carlo average error, plus floor verification on concrete designs."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds, disguise
from .decode import MAP_ITEM_BUDGET, DecoderId, decode_mask
from .design import TestDesign
from .errors import BudgetExceededError
from .model import Prior

BLOCK_TRIALS = 4096
_Z95 = 1.959963984540054
EXACT_ITEM_BUDGET = {DecoderId.COMP: 20, DecoderId.DD: 20, DecoderId.MAP: 14}
FLOOR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SimResult:
    """Outcome of a seeded Monte Carlo run.

    ``errors`` counts the tallied event (decoding mistakes, or disguise hits
    for `disguise_frequency`); the interval is Wilson 95%.
    """

    trials: int
    errors: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int
    decoder: DecoderId | None

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "errors": self.errors,
            "estimate": self.estimate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "seed": self.seed,
            "decoder": self.decoder.value if self.decoder else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SimResult:
        decoder = DecoderId(data["decoder"]) if data.get("decoder") else None
        return cls(
            trials=data["trials"],
            errors=data["errors"],
            estimate=data["estimate"],
            ci_low=data["ci_low"],
            ci_high=data["ci_high"],
            seed=data["seed"],
            decoder=decoder,
        )


@dataclass(frozen=True)
class LemmaCheck:
    """One item's exact disguise probability against its product bound."""

    item: int
    exact: float
    bound: float
    passed: bool

    def to_dict(self) -> dict:
        return {"item": self.item, "exact": self.exact, "bound": self.bound, "passed": self.passed}

    @classmethod
    def from_dict(cls, data: dict) -> LemmaCheck:
        return cls(data["item"], data["exact"], data["bound"], data["passed"])


@dataclass(frozen=True)
class VerificationReport:
    """Floor check for one design and prior.

    ``theorem_pass`` is None when the floor does not apply (T >= n); otherwise
    it records observed_error >= epsilon_floor (within tolerance), where the
    observed error is exact when feasible and a Monte Carlo lower confidence
    bound otherwise.
    """

    design_summary: str
    p: float
    epsilon_floor: float
    observed_error: float
    method: str
    applicable: bool
    theorem_pass: bool | None
    lemma_checks: tuple[LemmaCheck, ...]
    lemma_skipped: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "design_summary": self.design_summary,
            "p": self.p,
            "epsilon_floor": self.epsilon_floor,
            "observed_error": self.observed_error,
            "method": self.method,
            "applicable": self.applicable,
            "theorem_pass": self.theorem_pass,
            "lemma_checks": [c.to_dict() for c in self.lemma_checks],
            "lemma_skipped": list(self.lemma_skipped),
        }

    @classmethod
    def from_dict(cls, data: dict) -> VerificationReport:
        return cls(
            design_summary=data["design_summary"],
            p=data["p"],
            epsilon_floor=data["epsilon_floor"],
            observed_error=data["observed_error"],
            method=data["method"],
            applicable=data["applicable"],
            theorem_pass=data["theorem_pass"],
            lemma_checks=tuple(LemmaCheck.from_dict(c) for c in data["lemma_checks"]),
            lemma_skipped=tuple(data["lemma_skipped"]),
        )


def wilson_interval(hits: int, trials: int) -> tuple[float, float]:
    """Wilson 95% score interval; exactly [0, ...] at zero hits."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= hits <= trials:
        raise ValueError("hits must lie in [0, trials]")
    phat = hits / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = _Z95 * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom
    low = max(0.0, min(center - half, phat))
    high = min(1.0, max(center + half, phat))
    return low, high


def exact_average_error(design: TestDesign, prior: Prior, decoder: DecoderId) -> float:
    """Prior-weighted error probability, summed over all 2^n defective sets."""
    budget = EXACT_ITEM_BUDGET[decoder]
    if design.n > budget:
        raise BudgetExceededError(
            f"exact error with {decoder.value} enumerates 2^n sets; n = {design.n} exceeds {budget}"
        )
    n = design.n
    masks = design.row_masks
    errors_by_size = [0] * (n + 1)
    cache: dict[int, int] = {}
    for k in range(1 << n):
        sig = 0
        for t, m in enumerate(masks):
            if m & k:
                sig |= 1 << t
        estimate = cache.get(sig)
        if estimate is None:
            estimate = decode_mask(design, sig, decoder, prior)
            cache[sig] = estimate
        if estimate != k:
            errors_by_size[k.bit_count()] += 1
    return float(sum(c * prior.weight(j, n) for j, c in enumerate(errors_by_size) if c))


def _design_matrix(design: TestDesign) -> np.ndarray:
    X = np.zeros((design.T, design.n), dtype=np.float32)
    for t, mask in enumerate(design.row_masks):
        for i in design.items_in_test(t):
            X[t, i] = 1.0
    return X


def monte_carlo_error(
    design: TestDesign,
    prior: Prior,
    decoder: DecoderId,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> SimResult:
    """Estimate the average error probability by seeded simulation.

    Trials are pre-partitioned into fixed blocks of `BLOCK_TRIALS`; block b
    belongs to worker b mod workers, and worker w draws from its own
    substream seeded by (master_seed, w).  The result is therefore a
    deterministic function of (inputs, master_seed, workers), independent of
    scheduling.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if workers < 1:
        raise ValueError("workers must be positive")
    if master_seed < 0:
        raise ValueError("master seed must be nonnegative")
    n = design.n
    nblocks = (trials + BLOCK_TRIALS - 1) // BLOCK_TRIALS
    X = _design_matrix(design)
    cache: dict[bytes, int] = {}

    def run_worker(w: int) -> int:
        rng = np.random.default_rng([master_seed, w])
        errors = 0
        for b in range(w, nblocks, workers):
            size = trials - (nblocks - 1) * BLOCK_TRIALS if b == nblocks - 1 else BLOCK_TRIALS
            sample = rng.random((size, n)) < prior.p
            packed_k = np.packbits(sample, axis=1, bitorder="little")
            if design.T:
                positive = (sample.astype(np.float32) @ X.T) > 0.5
                packed_y = np.packbits(positive, axis=1, bitorder="little")
            else:
                packed_y = np.zeros((size, 0), dtype=np.uint8)
            for row in range(size):
                key = packed_y[row].tobytes()
                estimate = cache.get(key)
                if estimate is None:
                    estimate = decode_mask(design, int.from_bytes(key, "little"), decoder, prior)
                    cache[key] = estimate
                if estimate != int.from_bytes(packed_k[row].tobytes(), "little"):
                    errors += 1
        return errors

    if workers == 1:
        total = run_worker(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            total = sum(pool.map(run_worker, range(workers)))
    low, high = wilson_interval(total, trials)
    return SimResult(
        trials=trials,
        errors=total,
        estimate=total / trials,
        ci_low=low,
        ci_high=high,
        seed=master_seed,
        decoder=decoder,
    )


def disguise_frequency(
    design: TestDesign, prior: Prior, i: int, trials: int, seed: int
) -> SimResult:
    """Monte Carlo frequency of item i being totally disguised.

    Each trial samples the other items' defectivity and checks that every
    test containing i holds some defective besides i.  Returned with
    ``decoder=None``; ``errors`` counts the disguise hits.
    """
    if not 0 <= i < design.n:
        raise ValueError(f"item index {i} outside [0, {design.n})")
    if trials < 1:
        raise ValueError("trials must be positive")
    co_tests = [
        np.array(design.items_in_test(t), dtype=np.intp)
        for t, mask in enumerate(design.row_masks)
        if mask >> i & 1
    ]
    co_tests = [idx[idx != i] for idx in co_tests]
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < trials:
        size = min(8192, trials - done)
        sample = rng.random((size, design.n)) < prior.p
        ok = np.ones(size, dtype=bool)
        for idx in co_tests:
            if idx.size == 0:
                ok[:] = False
                break
            ok &= sample[:, idx].any(axis=1)
        hits += int(np.count_nonzero(ok))
        done += size
    low, high = wilson_interval(hits, trials)
    return SimResult(
        trials=trials,
        errors=hits,
        estimate=hits / trials,
        ci_low=low,
        ci_high=high,
        seed=seed,
        decoder=None,
    )


def verify_theorem(
    design: TestDesign,
    prior: Prior,
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> VerificationReport:
    """Check the observed error of a design against the floor epsilon(p).

    The floor applies only when T < n.  Observed error is the exact MAP error
    for small n, otherwise a Monte Carlo lower confidence bound (MAP when the
    decoding budget allows, COMP beyond it).  Per-item disguise bounds are
    checked exactly wherever the enumeration budget allows.
    """
    floor = bounds.epsilon_bound(prior).epsilon
    applicable = design.T < design.n
    if design.n <= EXACT_ITEM_BUDGET[DecoderId.MAP]:
        observed = exact_average_error(design, prior, DecoderId.MAP)
        method = "exact-map"
    elif design.n <= MAP_ITEM_BUDGET:
        observed = monte_carlo_error(design, prior, DecoderId.MAP, trials, seed, workers).ci_low
        method = "mc-map"
    else:
        observed = monte_carlo_error(design, prior, DecoderId.COMP, trials, seed, workers).ci_low
        method = "mc-comp"

    checks = []
    skipped = []
    for i in range(design.n):
        _, bound_i = disguise.disguise_bound(design, i, prior)
        if len(disguise.co_items(design, i)) <= disguise.CO_ITEM_BUDGET:
            exact_i = disguise.exact_disguise_prob(design, i, prior)
            checks.append(
                LemmaCheck(
                    item=i,
                    exact=exact_i,
                    bound=bound_i,
                    passed=exact_i >= bound_i - FLOOR_TOLERANCE,
                )
            )
        else:
            skipped.append(i)
    theorem_pass = observed >= floor - FLOOR_TOLERANCE if applicable else None
    return VerificationReport(
        design_summary=f"{design.T} tests x {design.n} items",
        p=prior.p,
        epsilon_floor=floor,
        observed_error=observed,
        method=method,
        applicable=applicable,
        theorem_pass=theorem_pass,
        lemma_checks=tuple(checks),
        lemma_skipped=tuple(skipped),
    )
