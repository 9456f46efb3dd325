"""Partition combinatorics: enumeration, contents, hooks."""

from __future__ import annotations

from functools import lru_cache


class Partition:
    """A partition as a weakly decreasing tuple of positive integers."""

    __slots__ = ("parts",)

    def __init__(self, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts must be weakly decreasing: {parts}")
        self.parts = parts

    def __eq__(self, other):
        return isinstance(other, Partition) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __repr__(self):
        return f"Partition{self.parts}"

    @property
    def size(self) -> int:
        return sum(self.parts)

    def boxes(self):
        """Boxes (i, j), 1-indexed, row i column j."""
        for i, row in enumerate(self.parts, start=1):
            for j in range(1, row + 1):
                yield (i, j)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return Partition()
        w = self.parts[0]
        return Partition(tuple(sum(1 for p in self.parts if p >= j) for j in range(1, w + 1)))

    def contents_sum(self) -> int:
        return sum(j - i for i, j in self.boxes())


def kappa(lam: Partition) -> int:
    """Twice the contents sum, kappa = 2 sum_{(i,j)} (j - i)."""
    return 2 * lam.contents_sum()


def kappa_alt(lam: Partition) -> int:
    """Alternative expression sum_i lambda_i (lambda_i - 2i + 1)."""
    return sum(p * (p - 2 * i + 1) for i, p in enumerate(lam.parts, start=1))


def hooks(lam: Partition) -> dict:
    """Hook lengths arm + leg + 1, keyed by box (i, j)."""
    conj = lam.conjugate().parts
    out = {}
    for i, j in lam.boxes():
        arm = lam.parts[i - 1] - j
        leg = conj[j - 1] - i
        out[(i, j)] = arm + leg + 1
    return out


def is_hook(lam: Partition):
    """Whether lambda = (a+1, 1^b); returns (flag, arm, leg).

    The empty partition is not a hook by convention.
    """
    p = lam.parts
    if not p:
        return False, None, None
    if any(x != 1 for x in p[1:]):
        return False, None, None
    return True, p[0] - 1, len(p) - 1


def _gen_exact(n: int, maxpart: int):
    """All partitions of exactly n with parts <= maxpart, largest-first order."""
    if n == 0:
        yield ()
        return
    for first in range(min(n, maxpart), 0, -1):
        for rest in _gen_exact(n - first, first):
            yield (first,) + rest


def enumerate_partitions(max_size: int) -> list:
    """All partitions with |lambda| <= max_size, sorted by (size, reverse-lex).

    The order is fixed so that tables and reports are byte-stable:
    e.g. max_size 2 gives [(), (1,), (2,), (1, 1)].
    """
    if max_size < 0:
        raise ValueError("max_size must be >= 0")
    out = []
    for n in range(max_size + 1):
        out.extend(Partition(p) for p in _gen_exact(n, n if n else 1))
    return out


@lru_cache(maxsize=None)
def _count_with_max(n: int, maxpart: int) -> int:
    if n == 0:
        return 1
    if n < 0 or maxpart == 0:
        return 0
    return _count_with_max(n - maxpart, min(maxpart, n - maxpart)) + _count_with_max(n, maxpart - 1)


def partition_count(n: int) -> int:
    """Number of partitions of n (independent counting oracle)."""
    if n < 0:
        return 0
    return _count_with_max(n, n)
