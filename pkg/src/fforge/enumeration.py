"""Enumeration of unlabelled free trees as canonical level sequences.

A level sequence lists vertex depths in preorder with the root at level 1.
Free trees are generated by the Wright-Richmond-Odlyzko-McKay successor
rule: rooted trees are visited in decreasing canonical order and only those
rooted at a centroid (with the bicentroid tie broken by comparing the first
subtree against the rest) are emitted, so every isomorphism class appears
exactly once.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import BadParam, BadSequence
from .tree import Tree, from_parents

MAX_N = 24

LevelSequence = tuple[int, ...]


@dataclass(frozen=True)
class ShardSpec:
    shard_index: int = 0
    shard_count: int = 1

    def __post_init__(self):
        if self.shard_count < 1 or not 0 <= self.shard_index < self.shard_count:
            raise BadParam(f"invalid shard {self.shard_index}/{self.shard_count}")


def _check_n(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= MAX_N:
        raise BadParam(f"free tree enumeration supports 1 <= n <= {MAX_N}, got {n!r}")


def _next_rooted(levels: list[int], p: int | None = None) -> list[int] | None:
    """Successor of a canonical rooted level sequence (None when exhausted).

    ``p`` forces the position to increment from; by default it is the last
    vertex deeper than level 2.
    """
    n = len(levels)
    if p is None:
        p = n - 1
        while levels[p] == 2:
            p -= 1
    if p == 0:
        return None
    q = p - 1
    while levels[q] != levels[p] - 1:
        q -= 1
    out = list(levels)
    for i in range(p, n):
        out[i] = out[i - p + q]
    return out


def _split(levels: list[int]) -> tuple[list[int], list[int]]:
    """First principal subtree (re-rooted at level 1) and the remainder."""
    m = len(levels)
    for i in range(2, len(levels)):
        if levels[i] == 2:
            m = i
            break
    return [x - 1 for x in levels[1:m]], [1] + levels[m:]


def _next_free(levels: list[int]) -> list[int] | None:
    left, rest = _split(levels)
    lh, rh = max(left), max(rest)
    valid = rh >= lh
    if valid and rh == lh:
        if len(left) > len(rest) or (len(left) == len(rest) and left > rest):
            valid = False
    if valid:
        return levels
    p = len(left)
    nxt = _next_rooted(levels, p)
    if levels[p] > 3:
        new_left, _ = _split(nxt)
        height = max(new_left)
        tail = list(range(2, height + 2))
        nxt[-len(tail):] = tail
    return nxt


def free_trees(n: int) -> Iterator[LevelSequence]:
    """Yield one canonical level sequence per free tree on ``n`` vertices."""
    _check_n(n)
    if n <= 2:
        yield tuple(range(1, n + 1))
        return
    levels = list(range(1, n // 2 + 2)) + list(range(2, (n + 1) // 2 + 1))
    while levels is not None:
        levels = _next_free(levels)
        if levels is not None:
            yield tuple(levels)
            levels = _next_rooted(levels)


def count_free_trees(n: int) -> int:
    return sum(1 for _ in free_trees(n))


def free_trees_shard(n: int, shard: ShardSpec) -> Iterator[LevelSequence]:
    """Sequences whose enumeration index is ``shard_index`` mod ``shard_count``."""
    k, step = shard.shard_index, shard.shard_count
    for i, seq in enumerate(free_trees(n)):
        if i % step == k:
            yield seq


def parents(seq: Sequence[int]) -> list[int]:
    """0-based parent array of a level sequence (root gets -1)."""
    if not seq or seq[0] != 1:
        raise BadSequence(f"level sequence must start with 1: {list(seq)!r}")
    last_at_level = {1: 0}
    out = [-1]
    for i in range(1, len(seq)):
        lv = seq[i]
        if not isinstance(lv, int) or lv < 2 or lv > seq[i - 1] + 1:
            raise BadSequence(f"invalid level {lv!r} at position {i}")
        out.append(last_at_level[lv - 1])
        last_at_level[lv] = i
    return out


def decode(seq: Sequence[int]) -> Tree:
    """Tree whose vertex ``i+1`` hangs below its nearest shallower predecessor."""
    return from_parents(parents(seq))


def format_level_sequences(seqs: Iterable[Sequence[int]]) -> str:
    return "".join(" ".join(map(str, s)) + "\n" for s in seqs)


def write_level_sequences(seqs: Iterable[Sequence[int]], path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        for s in seqs:
            fh.write(" ".join(map(str, s)) + "\n")


def read_level_sequences(path: str | os.PathLike) -> list[LevelSequence]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                try:
                    seq = tuple(int(x) for x in line.split())
                except ValueError:
                    raise BadSequence(f"non-integer level in {line.strip()!r}") from None
                parents(seq)
                out.append(seq)
    return out
