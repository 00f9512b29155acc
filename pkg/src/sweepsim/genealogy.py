"""Marked partitions of sampled neutral alleles and their ancestry classes.

A slot ``(i, k)`` is the neutral allele at locus ``k`` (1 or 2) of the i-th
sampled individual (1-based).  Slots are grouped by the individual alive at
time 0 they descend from; the group descending from the initial mutant is
the marked block.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from sweepsim.engine import MUTANT, PopulationState
from sweepsim.model import a

Slot = Tuple[int, int]
Block = FrozenSet[Slot]

N_CLASSES = 5


class SampleTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class MarkedPartition:
    blocks: Tuple[Block, ...]
    marked: Optional[Block] = None

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=min))
        object.__setattr__(self, "blocks", blocks)
        if self.marked is not None:
            object.__setattr__(self, "marked", frozenset(self.marked))
        slots = [s for b in blocks for s in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("empty block")
        if len(slots) != len(set(slots)):
            raise ValueError("blocks overlap")
        d = len(slots) // 2
        if set(slots) != {(i, k) for i in range(1, d + 1) for k in (1, 2)}:
            raise ValueError("blocks must cover exactly the slots (i, k), 1 <= i <= d, k in {1, 2}")
        if self.marked is not None and self.marked not in blocks:
            raise ValueError("marked block is not one of the blocks")

    @property
    def d(self) -> int:
        return sum(len(b) for b in self.blocks) // 2

    def block_of(self, slot: Slot) -> Block:
        for b in self.blocks:
            if slot in b:
                return b
        raise KeyError(slot)

    @classmethod
    def from_labels(cls, labels: Sequence[Tuple[int, int]]) -> "MarkedPartition":
        """Group slots by founder label; ``labels[i-1]`` is individual i's pair."""
        groups: Dict[int, set] = defaultdict(set)
        for i, pair in enumerate(labels, start=1):
            for k, lab in enumerate(pair, start=1):
                groups[int(lab)].add((i, k))
        blocks = tuple(frozenset(g) for g in groups.values())
        marked = frozenset(groups[MUTANT]) if MUTANT in groups else None
        return cls(blocks, marked)

    def serialize(self) -> str:
        """One line per block, slots as ``i.k``, marked block suffixed ``*``."""
        lines = []
        for b in self.blocks:
            line = " ".join(f"{i}.{k}" for i, k in sorted(b))
            lines.append(line + ("*" if b == self.marked else ""))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "MarkedPartition":
        blocks, marked = [], None
        for line in text.strip().splitlines():
            line = line.strip()
            is_marked = line.endswith("*")
            slots = []
            for tok in line.rstrip("*").split():
                i, k = tok.split(".")
                slots.append((int(i), int(k)))
            b = frozenset(slots)
            blocks.append(b)
            if is_marked:
                if marked is not None:
                    raise ValueError("more than one marked block")
                marked = b
        return cls(tuple(blocks), marked)


@dataclass(frozen=True)
class ClassCounts:
    m1: int
    m2: int
    m3: int
    m4: int
    m5: int
    in_delta: bool

    def as_tuple(self) -> Tuple[int, int, int, int, int]:
        return (self.m1, self.m2, self.m3, self.m4, self.m5)

    @property
    def total(self) -> int:
        return sum(self.as_tuple())


def sample_partition(final_pop: PopulationState, d: int, rng: np.random.Generator) -> MarkedPartition:
    """Sample ``d`` mutant-allele carriers without replacement and group their slots."""
    if final_pop.n_A != 0:
        raise ValueError("sampling requires a population where the resident allele is lost")
    _, l1, l2 = final_pop.trait_arrays(a)
    n = len(l1)
    if d > n:
        raise SampleTooLarge(f"cannot sample {d} individuals from {n}")
    # partial Fisher-Yates over positions
    pos = np.arange(n)
    for j in range(d):
        r = j + int(rng.integers(0, n - j))
        pos[j], pos[r] = pos[r], pos[j]
    chosen = pos[:d]
    return MarkedPartition.from_labels(list(zip(l1[chosen].tolist(), l2[chosen].tolist())))


def individual_classes(p: MarkedPartition) -> List[Optional[int]]:
    """Ancestry class (1..5) of each sampled individual, ``None`` if it fits none."""
    out: List[Optional[int]] = []
    for i in range(1, p.d + 1):
        b1, b2 = p.block_of((i, 1)), p.block_of((i, 2))
        m1, m2 = b1 == p.marked, b2 == p.marked
        if m1 and m2:
            out.append(1)
        elif m1 and b2 == {(i, 2)}:
            out.append(2)
        elif m2 and b1 == {(i, 1)}:
            out.append(3)
        elif not m1 and b1 == {(i, 1), (i, 2)}:
            out.append(4)
        elif b1 == {(i, 1)} and b2 == {(i, 2)} and not (m1 or m2):
            out.append(5)
        else:
            out.append(None)
    return out


def marginal_classes(p: MarkedPartition) -> List[int]:
    """Class of each individual in the partition restricted to its own two slots.

    Unlike :func:`individual_classes`, blocks shared with other sampled
    individuals are ignored, so every individual gets a class and the result
    has the law of a sample of size one.
    """
    out = []
    for i in range(1, p.d + 1):
        b1, b2 = p.block_of((i, 1)), p.block_of((i, 2))
        m1, m2 = b1 == p.marked, b2 == p.marked
        if m1 and m2:
            out.append(1)
        elif m1:
            out.append(2)
        elif m2:
            out.append(3)
        else:
            out.append(4 if b1 == b2 else 5)
    return out


def in_delta(p: MarkedPartition) -> bool:
    """Every unmarked block is a singleton or one individual's pair of slots."""
    for b in p.blocks:
        if b == p.marked or len(b) == 1:
            continue
        if len(b) == 2 and len({i for i, _ in b}) == 1:
            continue
        return False
    return True


def classify(p: MarkedPartition) -> ClassCounts:
    counts = [0] * N_CLASSES
    for c in individual_classes(p):
        if c is not None:
            counts[c - 1] += 1
    return ClassCounts(*counts, in_delta=in_delta(p))


def escapes(p: MarkedPartition) -> List[Tuple[bool, bool]]:
    """Per individual, whether the N1 and N2 alleles lie outside the marked block."""
    return [((i, 1) not in (p.marked or ()), (i, 2) not in (p.marked or ()))
            for i in range(1, p.d + 1)]
