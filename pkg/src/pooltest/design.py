"""Construction, reduction, and text serialization of nonadaptive test designs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DesignFormatError, DesignGenerationError

STUB_RETRY_BUDGET = 1000


@dataclass(frozen=True)
class TestDesign:
    """A T x n binary inclusion matrix.

    Rows are stored as integer bitmasks (bit ``i`` set means item ``i`` is in
    the test), with per-test weights cached at construction.  Instances are
    immutable and hashable, so they can be shared across threads and used as
    cache keys.
    """

    __test__ = False  # keep pytest from collecting the Test* name

    n: int
    row_masks: tuple[int, ...]
    weights: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"item count must be nonnegative, got {self.n}")
        masks = tuple(int(m) for m in self.row_masks)
        full = (1 << self.n) - 1
        for t, m in enumerate(masks):
            if not 0 <= m <= full:
                raise ValueError(f"test {t} references items outside [0, {self.n})")
        object.__setattr__(self, "row_masks", masks)
        object.__setattr__(self, "weights", tuple(m.bit_count() for m in masks))

    @property
    def T(self) -> int:
        return len(self.row_masks)

    def items_in_test(self, t: int) -> tuple[int, ...]:
        return _bit_positions(self.row_masks[t])


@dataclass(frozen=True)
class ReductionLog:
    """Record of what `reduce_design` removed, sufficient to map results back.

    ``item_map[j]`` / ``test_map[t]`` give the original index of reduced item
    ``j`` / reduced test ``t``.  ``resolved_items`` lists ``(item, test)``
    pairs in removal order; each test had weight exactly 1 when removed.
    """

    removed_empty_tests: tuple[int, ...]
    resolved_items: tuple[tuple[int, int], ...]
    item_map: tuple[int, ...]
    test_map: tuple[int, ...]

    def lift_items(self, reduced_items: Iterable[int]) -> tuple[int, ...]:
        """Translate reduced item indices back to original item indices."""
        return tuple(sorted(self.item_map[j] for j in reduced_items))


def _bit_positions(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _mask_from_indices(indices: Iterable[int], n: int) -> int:
    mask = 0
    for i in indices:
        i = int(i)
        if not 0 <= i < n:
            raise ValueError(f"item index {i} outside [0, {n})")
        mask |= 1 << i
    return mask


def new_design(rows: Iterable[Iterable[int]], n: int) -> TestDesign:
    """Build a design from an iterable of item-index collections."""
    if n < 1:
        raise ValueError("a design needs at least one item")
    masks = tuple(_mask_from_indices(row, n) for row in rows)
    return TestDesign(n=n, row_masks=masks)


def gen_individual(n: int) -> TestDesign:
    """The identity design: test t contains exactly item t."""
    if n < 1:
        raise ValueError("a design needs at least one item")
    return TestDesign(n=n, row_masks=tuple(1 << i for i in range(n)))


def gen_bernoulli(n: int, T: int, nu: float, seed: int) -> TestDesign:
    """Each entry set independently with probability ``nu``, seeded."""
    if n < 1:
        raise ValueError("a design needs at least one item")
    if T < 0:
        raise ValueError("test count must be nonnegative")
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"inclusion probability must lie in [0, 1], got {nu}")
    rng = np.random.default_rng(seed)
    entries = rng.random((T, n)) < nu
    return TestDesign(n=n, row_masks=tuple(_pack_row(row) for row in entries))


def gen_doubly_regular(n: int, l: int, r: int, seed: int) -> TestDesign:
    """Sample a design with every column weight l and every row weight r.

    Uses configuration-model stub matching: the n*l item stubs are matched to
    the T*r test slots by one seeded permutation, and the whole matching is
    rejected and resampled whenever an item lands twice in the same test.
    """
    if n < 1:
        raise ValueError("a design needs at least one item")
    if l < 1 or r < 1:
        raise ValueError("tests-per-item and items-per-test must be at least 1")
    if r > n:
        raise ValueError(f"a test of {r} distinct items needs at least {r} items")
    if (n * l) % r != 0:
        raise ValueError(f"n*l = {n * l} is not divisible by items-per-test r = {r}")
    T = n * l // r
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), l)
    for _ in range(STUB_RETRY_BUDGET):
        matched = rng.permutation(stubs).reshape(T, r)
        srt = np.sort(matched, axis=1)
        if T == 0 or r == 1 or bool((srt[:, 1:] != srt[:, :-1]).all()):
            masks = tuple(_mask_from_indices(row, n) for row in matched)
            return TestDesign(n=n, row_masks=masks)
    raise DesignGenerationError(
        f"no collision-free stub matching found in {STUB_RETRY_BUDGET} attempts"
    )


def _pack_row(row: np.ndarray) -> int:
    if row.size == 0:
        return 0
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def row_weights(design: TestDesign) -> tuple[int, ...]:
    """Per-test item counts."""
    return design.weights


def reduce_design(design: TestDesign) -> tuple[TestDesign, ReductionLog]:
    """Strip weight-0 tests and resolve weight-1 tests until all weights >= 2.

    Weight-0 tests are dropped outright.  While any weight-1 test remains, the
    lowest-indexed one is removed together with the single item it tests, and
    weights are re-checked (removals can create new weight-0/1 tests).  The
    returned log carries the original indices of everything removed plus the
    reduced-to-original index maps.
    """
    tests: list[tuple[int, int]] = list(enumerate(design.row_masks))
    removed_empty: list[int] = []
    resolved: list[tuple[int, int]] = []
    alive = [True] * design.n
    while True:
        kept = []
        for orig_t, mask in tests:
            if mask == 0:
                removed_empty.append(orig_t)
            else:
                kept.append((orig_t, mask))
        tests = kept
        hit = next((k for k, (_, m) in enumerate(tests) if m.bit_count() == 1), None)
        if hit is None:
            break
        orig_t, mask = tests.pop(hit)
        item = mask.bit_length() - 1
        resolved.append((item, orig_t))
        alive[item] = False
        clear = ~mask
        tests = [(o, m & clear) for o, m in tests]

    item_map = tuple(i for i in range(design.n) if alive[i])
    new_pos = {orig: j for j, orig in enumerate(item_map)}
    reduced_masks = []
    test_map = []
    for orig_t, mask in tests:
        compact = 0
        for i in _bit_positions(mask):
            compact |= 1 << new_pos[i]
        reduced_masks.append(compact)
        test_map.append(orig_t)
    reduced = TestDesign(n=len(item_map), row_masks=tuple(reduced_masks))
    log = ReductionLog(
        removed_empty_tests=tuple(removed_empty),
        resolved_items=tuple(resolved),
        item_map=item_map,
        test_map=tuple(test_map),
    )
    return reduced, log


def format_design(design: TestDesign) -> str:
    """Render the text format: a `T n` header then one 0/1 row per test."""
    lines = [f"{design.T} {design.n}"]
    for mask in design.row_masks:
        lines.append("".join("1" if mask >> i & 1 else "0" for i in range(design.n)))
    return "\n".join(lines) + "\n"


def parse_design(text: str) -> TestDesign:
    """Parse the text format; lines starting with ``#`` are ignored."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise DesignFormatError("missing `T n` header line")
    head = lines[0].split()
    if len(head) != 2:
        raise DesignFormatError(f"header must be two integers `T n`, got {lines[0]!r}")
    try:
        T, n = int(head[0]), int(head[1])
    except ValueError as exc:
        raise DesignFormatError(f"header must be two integers `T n`, got {lines[0]!r}") from exc
    if T < 0 or n < 1:
        raise DesignFormatError(f"need T >= 0 and n >= 1, got T={T} n={n}")
    body = lines[1:]
    if len(body) != T:
        raise DesignFormatError(f"expected {T} test rows, found {len(body)}")
    masks = []
    for t, row in enumerate(body):
        if len(row) != n or set(row) - {"0", "1"}:
            raise DesignFormatError(f"test row {t} must be exactly {n} characters of 0/1")
        masks.append(sum(1 << i for i, c in enumerate(row) if c == "1"))
    return TestDesign(n=n, row_masks=tuple(masks))


def load_design(path: str) -> TestDesign:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_design(fh.read())


def save_design(design: TestDesign, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_design(design))
