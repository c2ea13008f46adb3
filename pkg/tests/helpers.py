"""Independent oracles and generators shared across the test suite.

Everything here recomputes quantities from first principles (plain loops over
the matrix entries, exhaustive scans, full map enumeration) so that library
results are checked against code that shares none of their shortcuts.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from pooltest import TestDesign, new_design


def design_from_masks(masks, n: int) -> TestDesign:
    return TestDesign(n=n, row_masks=tuple(masks))


def all_designs(n: int, T: int):
    """Every 0/1 matrix with T tests over n items."""
    for masks in itertools.product(range(1 << n), repeat=T):
        yield design_from_masks(masks, n)


def outcome_signature(design: TestDesign, k_mask: int) -> int:
    """Reference OR-channel: bit t set iff test t holds a defective."""
    sig = 0
    for t, mask in enumerate(design.row_masks):
        if mask & k_mask:
            sig |= 1 << t
    return sig


def set_weight(p: float, k_mask: int, n: int) -> float:
    k = bin(k_mask).count("1")
    return p**k * (1.0 - p) ** (n - k)


def scan_l_star(p: float, w_max: int = 10**4) -> tuple[float, int]:
    """Exhaustive-scan oracle for the integer-weight minimum, no certification."""
    q = 1.0 - p
    best, best_w = None, None
    for w in range(2, w_max + 1):
        value = w * math.log(1.0 - q ** (w - 1))
        if best is None or value < best:
            best, best_w = value, w
    return best, best_w


def grouped_map_error(design: TestDesign, p: float) -> float:
    """Exact MAP error via per-signature best weight, independent of the decoder.

    A MAP decoder gets exactly one defective set right per distinct outcome:
    a consistent one of maximal prior weight.  So the minimal error equals
    1 - sum over signatures of the maximal weight in that signature's fiber.
    """
    best: dict[int, float] = {}
    for k in range(1 << design.n):
        sig = outcome_signature(design, k)
        w = set_weight(p, k, design.n)
        if w > best.get(sig, -1.0):
            best[sig] = w
    return 1.0 - sum(best.values())


def brute_force_optimal_error(design: TestDesign, p: float) -> float:
    """Minimum average error over ALL deterministic outcome-to-estimate maps.

    Literal enumeration: every assignment of an estimate (any of the 2^n
    subsets) to every achievable outcome signature.  Tiny instances only.
    """
    n = design.n
    fibers: dict[int, list[int]] = {}
    for k in range(1 << n):
        fibers.setdefault(outcome_signature(design, k), []).append(k)
    sigs = sorted(fibers)
    best_correct = -1.0
    for estimates in itertools.product(range(1 << n), repeat=len(sigs)):
        correct = 0.0
        for sig, est in zip(sigs, estimates):
            if outcome_signature(design, est) == sig:
                correct += set_weight(p, est, n)
        if correct > best_correct:
            best_correct = correct
    return 1.0 - best_correct


def exact_disguise_oracle(design: TestDesign, i: int, p: float) -> float:
    """Disguise probability by direct sum over all patterns of the other items."""
    own_tests = [mask & ~(1 << i) for mask in design.row_masks if mask >> i & 1]
    total = 0.0
    for k in range(1 << design.n):
        if k >> i & 1:
            continue  # item i's own status does not enter the event
        if all(mask & k for mask in own_tests):
            total += set_weight(p, k, design.n - 1)
    return total


def random_min2_design(rng: np.random.Generator, n: int, T: int) -> TestDesign:
    """Random design with every test weight >= 2."""
    rows = []
    for _ in range(T):
        w = int(rng.integers(2, n + 1))
        rows.append(set(rng.choice(n, size=w, replace=False).tolist()))
    return new_design(rows, n)


def random_messy_design(rng: np.random.Generator, n: int, T: int) -> TestDesign:
    """Random design that may contain weight-0 and weight-1 tests."""
    rows = []
    for _ in range(T):
        w = int(rng.integers(0, n + 1))
        rows.append(set(rng.choice(n, size=w, replace=False).tolist()))
    return new_design(rows, n)
