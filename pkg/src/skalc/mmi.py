"""Multivariate mutual information by partition search.

For a partition P of the user set into at least two blocks,

    I_P = (sum of block entropies - joint entropy) / (number of blocks - 1)

and the multivariate mutual information is the minimum of I_P over all such
partitions.  With two users this is the usual Shannon mutual information.
The minimizers form a lattice whose bottom element, the finest optimal
partition, refines every other minimizer; that structure is asserted here.

Partitions are enumerated through restricted growth strings, so the user
count is capped (default 8, hard maximum 12).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import InternalCheckError, ResourceCapError, ValidationError
from .source_model import HypergraphicalSource, JointPMF, SourceSpec, entropy

__all__ = [
    "Partition",
    "MmiResult",
    "iter_partitions",
    "partition_info",
    "residual_independence_gamma",
    "mmi",
    "DEFAULT_USER_CAP",
    "HARD_USER_CAP",
]

DEFAULT_USER_CAP = 8
HARD_USER_CAP = 12

# A partition is a tuple of blocks, each block a frozenset of user ids.
Partition = tuple[frozenset[str], ...]

FLOAT_TIE_TOL = 1e-9


def iter_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Yield all set partitions of range(n) as restricted growth strings.

    A restricted growth string assigns block label a[i] to element i with
    a[0] = 0 and a[i] <= max(a[:i]) + 1, which enumerates each partition
    exactly once.
    """
    if n < 1:
        return
    a = [0] * n
    b = [0] * n  # b[i] = max(a[:i+1]) running prefix maximum
    while True:
        yield tuple(a)
        # increment from the right, respecting the growth constraint
        i = n - 1
        while i > 0 and a[i] == b[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        b[i] = max(b[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = b[i]


def _labels_to_masks(labels: Sequence[int]) -> list[int]:
    nblocks = max(labels) + 1
    masks = [0] * nblocks
    for i, lab in enumerate(labels):
        masks[lab] |= 1 << i
    return masks


def _canonical_partition(source: SourceSpec, masks: Sequence[int]) -> Partition:
    blocks = []
    for m in masks:
        blocks.append(frozenset(source.users[i] for i in range(len(source.users)) if m >> i & 1))
    blocks.sort(key=lambda b: sorted(b))
    return tuple(blocks)


def _partition_masks(source: SourceSpec, partition: Sequence[Sequence[str]]) -> list[int]:
    n = len(source.users)
    masks = []
    seen = 0
    for block in partition:
        block = list(block)
        if not block:
            raise ValidationError("partition blocks must be non-empty")
        m = 0
        for u in block:
            m |= 1 << source.user_index(u)
        if m & seen:
            raise ValidationError("partition blocks must be disjoint")
        seen |= m
        masks.append(m)
    if seen != (1 << n) - 1:
        raise ValidationError("partition must cover all users")
    if len(masks) < 2:
        raise ValidationError("partition needs at least two blocks")
    return masks


def _block_entropy(source: SourceSpec, mask: int):
    if isinstance(source, HypergraphicalSource):
        return source.entropy_of_mask(mask)
    users = [u for i, u in enumerate(source.users) if mask >> i & 1]
    return entropy(source, users)


def partition_info(source: SourceSpec, partition: Sequence[Sequence[str]]) -> Fraction | float:
    """The normalized total correlation I_P of one partition."""
    masks = _partition_masks(source, partition)
    total = _block_entropy(source, (1 << len(source.users)) - 1)
    acc = sum(_block_entropy(source, m) for m in masks)
    return (acc - total) / (len(masks) - 1)


def residual_independence_gamma(source: SourceSpec, partition: Sequence[Sequence[str]]) -> Fraction | float:
    """Solve H(V) - g = sum over blocks of (H(block) - g) for g.

    The unique solution is exactly I_P: subtracting g from the joint entropy
    and from every block entropy balances once the shared part is removed.
    """
    return partition_info(source, partition)


def _refines(fine: Partition, coarse: Partition) -> bool:
    return all(any(b <= c for c in coarse) for b in fine)


@dataclass(frozen=True)
class MmiResult:
    value: Fraction | float
    finest: Partition
    minimizers: tuple[Partition, ...]


def mmi(source: SourceSpec, cap: int = DEFAULT_USER_CAP) -> MmiResult:
    """Minimize I_P over all partitions with at least two blocks.

    Exact rational arithmetic for hypergraphical sources; floats with a 1e-9
    tie tolerance for pmfs.  Raises ResourceCapError when the user count
    exceeds ``cap`` (hard maximum 12: the enumeration is Bell-number sized).
    """
    if cap > HARD_USER_CAP:
        raise ValidationError(f"cap {cap} exceeds hard maximum {HARD_USER_CAP}")
    n = len(source.users)
    if n > cap:
        raise ResourceCapError(f"{n} users exceed partition enumeration cap {cap}")
    exact = isinstance(source, HypergraphicalSource)

    ent_cache: dict[int, Fraction | float] = {}

    def block_h(mask: int):
        h = ent_cache.get(mask)
        if h is None:
            h = _block_entropy(source, mask)
            ent_cache[mask] = h
        return h

    total = block_h((1 << n) - 1)

    def info(masks: list[int]):
        acc = sum(block_h(m) for m in masks)
        return (acc - total) / (len(masks) - 1)

    # Two passes: find the minimum, then collect minimizers (exact equality
    # for rational sources, 1e-9 tie tolerance for floats).
    best = None
    for labels in iter_partitions(n):
        masks = _labels_to_masks(labels)
        if len(masks) < 2:
            continue
        value = info(masks)
        if best is None or value < best:
            best = value
    assert best is not None
    minimizer_masks = []
    for labels in iter_partitions(n):
        masks = _labels_to_masks(labels)
        if len(masks) < 2:
            continue
        value = info(masks)
        if value == best if exact else abs(value - best) <= FLOAT_TIE_TOL:
            minimizer_masks.append(masks)
    minimizers = tuple(_canonical_partition(source, m) for m in minimizer_masks)
    finest = max(minimizers, key=lambda p: (len(p), [sorted(b) for b in p]))
    for other in minimizers:
        if not _refines(finest, other):
            raise InternalCheckError(
                "finest minimizer does not refine a co-minimizer; "
                f"finest={finest} other={other}"
            )
    return MmiResult(best, finest, minimizers)
