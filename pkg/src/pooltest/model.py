"""Defectivity prior, defective sets, and the OR test channel."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .design import TestDesign, _bit_positions, _pack_row


@dataclass(frozen=True)
class Prior:
    """Independent per-item defectivity probability ``p``, with ``q = 1 - p``."""

    p: float
    q: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"defectivity probability must lie strictly in (0, 1), got {self.p}")
        object.__setattr__(self, "q", 1.0 - self.p)

    def weight(self, defectives: int, n: int) -> float:
        """Prior probability of one particular defective set of the given size."""
        return self.p**defectives * self.q ** (n - defectives)


@dataclass(frozen=True)
class DefectiveSet:
    """A subset of the n items, stored as a bitmask (bit ``i`` <-> item ``i``)."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"universe size must be nonnegative, got {self.n}")
        if not 0 <= self.mask < (1 << self.n) or self.mask < 0:
            raise ValueError("defective-set mask has bits outside the universe")

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> DefectiveSet:
        mask = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < n:
                raise ValueError(f"item index {i} outside [0, {n})")
            mask |= 1 << i
        return cls(n=n, mask=mask)

    @classmethod
    def empty(cls, n: int) -> DefectiveSet:
        return cls(n=n, mask=0)

    @property
    def members(self) -> frozenset[int]:
        return frozenset(_bit_positions(self.mask))

    @property
    def indices(self) -> tuple[int, ...]:
        return _bit_positions(self.mask)

    def __contains__(self, item: int) -> bool:
        return 0 <= item < self.n and bool(self.mask >> item & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return self.mask.bit_count()


@dataclass(frozen=True)
class OutcomeVector:
    """The T test results, in test order."""

    bits: tuple[bool, ...]

    @classmethod
    def from_string(cls, text: str) -> OutcomeVector:
        if set(text) - {"0", "1"}:
            raise ValueError(f"outcome string must contain only 0/1, got {text!r}")
        return cls(tuple(c == "1" for c in text))

    @classmethod
    def from_signature(cls, signature: int, T: int) -> OutcomeVector:
        return cls(tuple(bool(signature >> t & 1) for t in range(T)))

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @property
    def signature(self) -> int:
        sig = 0
        for t, b in enumerate(self.bits):
            if b:
                sig |= 1 << t
        return sig

    def __len__(self) -> int:
        return len(self.bits)


def sample_defective_set(n: int, prior: Prior, seed: int) -> DefectiveSet:
    """Draw each item defective independently with probability p, seeded."""
    if n < 1:
        raise ValueError("universe must contain at least one item")
    rng = np.random.default_rng(seed)
    return DefectiveSet(n=n, mask=_pack_row(rng.random(n) < prior.p))


def outcomes(design: TestDesign, defectives: DefectiveSet) -> OutcomeVector:
    """Test t is positive iff it contains at least one defective item."""
    if defectives.n != design.n:
        raise ValueError(
            f"defective set is over {defectives.n} items but the design has {design.n}"
        )
    k = defectives.mask
    return OutcomeVector(tuple(bool(m & k) for m in design.row_masks))
