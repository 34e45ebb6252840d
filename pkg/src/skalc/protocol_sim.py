"""Finite-blocklength linear secrecy schemes on integer-weight sources.

A blocklength-n instance of an integer-weight hypergraphical source is a
vector of i.i.d. uniform bits, one per (edge, weight unit, copy).  Users
observe the bits of their incident edges.  A scheme is a pair of GF(2)
matrices over those bits: public transcript rows, each spoken by a user who
observes the row's support, and key rows.  Verification is exact linear
algebra: every user must reach the key rows from own bits plus transcript,
the key must be full-rank (uniform), and the transcript must be independent
of the key (ranks add).

Two constructions are provided: spanning-tree packing for pairwise sources
(one key bit per packed tree) and random binning that first drives all users
to omniscience at rates from the discussion-rate optimizer, then reads the
key off as the untouched quotient of the source space.
"""

from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InternalCheckError, ResourceCapError, ValidationError
from .gf2 import Gf2Basis, complement_units
from .omniscience import rco
from .source_model import HypergraphicalSource, is_pin

__all__ = [
    "BitSourceInstance",
    "LinearScheme",
    "VerificationReport",
    "verify",
    "validate_scheme",
    "tree_packing_scheme",
    "TreePacking",
    "random_binning_omniscience",
    "RandomBinning",
    "scheme_to_json",
    "scheme_from_json",
    "BIT_CAP",
]

BIT_CAP = 1 << 16


class BitSourceInstance:
    """n independent copies of an integer-weight source, as labelled bits.

    Bit layout follows edge declaration order: edge e occupies w_e * n
    consecutive bit positions.  User masks mark the bits of incident edges.
    """

    def __init__(self, source: HypergraphicalSource, n: int):
        if not isinstance(source, HypergraphicalSource):
            raise ValidationError("bit instances need a hypergraphical source")
        if not isinstance(n, int) or n < 1:
            raise ValidationError("blocklength must be a positive integer")
        for eid, w in zip(source.edge_ids, source.weights):
            if w.denominator != 1:
                raise ValidationError(f"edge {eid!r} has non-integer weight {w}; "
                                      "bit instances need integer weights")
        self.source = source
        self.n = n
        offsets = []
        pos = 0
        for w in source.weights:
            offsets.append(pos)
            pos += int(w) * n
        if pos > BIT_CAP:
            raise ResourceCapError(f"{pos} bits exceed the instance cap {BIT_CAP}")
        self.offsets = tuple(offsets)
        self.total_bits = pos
        masks = {}
        for ui, user in enumerate(source.users):
            m = 0
            for off, w, inc in zip(offsets, source.weights, source.incidence):
                if ui in inc:
                    m |= ((1 << int(w) * n) - 1) << off
            masks[user] = m
        self._user_masks = masks

    def user_mask(self, user: str) -> int:
        try:
            return self._user_masks[user]
        except KeyError:
            raise ValidationError(f"unknown user {user!r}") from None

    def edge_bits(self, edge_index: int) -> range:
        off = self.offsets[edge_index]
        return range(off, off + int(self.source.weights[edge_index]) * self.n)


@dataclass(frozen=True)
class LinearScheme:
    """Transcript rows (mask, speaker) and key rows, all width `width`."""

    width: int
    transcript: tuple[tuple[int, str], ...]
    key: tuple[int, ...]

    def __post_init__(self):
        limit = 1 << self.width
        for row, speaker in self.transcript:
            if not 0 <= row < limit:
                raise ValidationError(f"transcript row out of range for width {self.width}")
            if not isinstance(speaker, str):
                raise ValidationError("transcript speaker must be a user id")
        for row in self.key:
            if not 0 < row < limit:
                raise ValidationError("key rows must be nonzero and within width")


@dataclass(frozen=True)
class VerificationReport:
    recoverable: Mapping[str, bool]
    perfectly_secret: bool
    key_uniform: bool
    key_bits: int
    transcript_bits: int

    @property
    def ok(self) -> bool:
        return all(self.recoverable.values()) and self.perfectly_secret and self.key_uniform


def validate_scheme(instance: BitSourceInstance, scheme: LinearScheme) -> None:
    if scheme.width != instance.total_bits:
        raise ValidationError(
            f"scheme width {scheme.width} != instance bits {instance.total_bits}")
    for row, speaker in scheme.transcript:
        mask = instance.user_mask(speaker)
        if row & ~mask:
            raise ValidationError(
                f"user {speaker!r} cannot speak a row on bits outside their view")


def verify(instance: BitSourceInstance, scheme: LinearScheme) -> VerificationReport:
    """Exact checks: per-user key recovery, key uniformity, transcript/key
    independence."""
    validate_scheme(instance, scheme)
    a_rows = [row for row, _ in scheme.transcript]
    a_basis = Gf2Basis(a_rows)
    b_basis = Gf2Basis(scheme.key)
    key_uniform = b_basis.rank == len(scheme.key)
    joint = a_basis.copy()
    added = sum(1 for row in scheme.key if joint.add(row))
    perfectly_secret = added == b_basis.rank

    recoverable = {}
    for user in instance.source.users:
        basis = a_basis.copy()
        obs = instance.user_mask(user)
        k = 0
        while obs:
            if obs & 1:
                basis.add(1 << k)
            obs >>= 1
            k += 1
        recoverable[user] = all(basis.contains(row) for row in scheme.key)
    return VerificationReport(
        recoverable=recoverable,
        perfectly_secret=perfectly_secret,
        key_uniform=key_uniform,
        key_bits=len(scheme.key),
        transcript_bits=len(scheme.transcript),
    )


# ---------------------------------------------------------------- packing --


def _forest_path(adj, u, v):
    """Elements on the u..v path of one forest; None if disconnected."""
    if u == v:
        return []
    prev = {u: (None, None)}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for (y, elem) in adj[x]:
            if y not in prev:
                prev[y] = (x, elem)
                if y == v:
                    path = []
                    while y != u:
                        x2, e2 = prev[y]
                        path.append(e2)
                        y = x2
                    return path
                queue.append(y)
    return None


def _partition_into_forests(nv: int, elements: Sequence[tuple[int, int]], k: int):
    """Knuth-style matroid partition of multigraph edges into k forests.

    Inserts greedily with BFS augmentation over the exchange graph (arcs
    from an element to the members of the circuit it closes).  An element
    with no augmenting path can never be placed later, so it is skipped
    for good.  Returns (forests as element-index sets, owner map).
    """
    adj = [{v: [] for v in range(nv)} for _ in range(k)]
    owner: dict[int, int] = {}

    def insert(y: int) -> bool:
        parent: dict[int, int | None] = {y: None}
        queue = deque([y])
        while queue:
            x = queue.popleft()
            ux, vx = elements[x]
            for i in range(k):
                path = _forest_path(adj[i], ux, vx)
                if path is None:
                    cur, fi = x, i
                    while True:
                        old = owner.get(cur)
                        cu, cv = elements[cur]
                        if old is not None:
                            adj[old][cu] = [(w, e) for (w, e) in adj[old][cu] if e != cur]
                            adj[old][cv] = [(w, e) for (w, e) in adj[old][cv] if e != cur]
                        adj[fi][cu].append((cv, cur))
                        adj[fi][cv].append((cu, cur))
                        owner[cur] = fi
                        p = parent[cur]
                        if p is None:
                            return True
                        cur, fi = p, old
                else:
                    for z in path:
                        if z not in parent:
                            parent[z] = x
                            queue.append(z)
        return False

    for y in range(len(elements)):
        insert(y)
    forests = [set() for _ in range(k)]
    for elem, f in owner.items():
        forests[f].add(elem)
    return forests, owner


def _max_spanning_tree_packing(nv: int, elements: Sequence[tuple[int, int]]):
    """Largest k with k edge-disjoint spanning trees; returns their element
    sets.  Retries the partition from scratch for each k and keeps the last
    full packing."""
    best: list[set[int]] = []
    if nv < 2:
        return best
    k = 1
    upper = len(elements) // (nv - 1)
    while k <= upper:
        forests, _ = _partition_into_forests(nv, elements, k)
        if all(len(f) == nv - 1 for f in forests):
            best = forests
            k += 1
        else:
            break
    return best


def _tree_rows(instance: BitSourceInstance, elements, tree: set[int]):
    """Key bit and transcript rows for one spanning tree.

    Edges are ordered by BFS from the lexicographically smallest user.  The
    key is the bit of the first edge; for every later edge, the endpoint
    already reached announces the XOR of that edge's bit with the bit of its
    own first incident tree edge.  Chaining these equations lets every user
    walk its anchor bit back to the key bit.
    """
    users = instance.source.users
    nv = len(users)
    adj = {v: [] for v in range(nv)}
    for elem in tree:
        u, v = elements[elem]
        adj[u].append((v, elem))
        adj[v].append((u, elem))
    for v in adj:
        adj[v].sort()
    root = 0
    visited = {root}
    order = []  # (elem, known_endpoint, new_endpoint)
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for (w, elem) in adj[v]:
            if w not in visited:
                visited.add(w)
                order.append((elem, v, w))
                queue.append(w)
    if len(visited) != nv:
        raise InternalCheckError("packed forest is not spanning")
    first_edge: dict[int, int] = {}
    e1, r0, w0 = order[0]
    first_edge[r0] = e1
    first_edge[w0] = e1
    rows = []
    for elem, v, w in order[1:]:
        anchor = first_edge[v]
        rows.append(((1 << anchor) | (1 << elem), users[v]))
        first_edge[w] = elem
    return (1 << e1), rows


@dataclass(frozen=True)
class TreePacking:
    instance: BitSourceInstance
    scheme: LinearScheme
    trees: tuple[tuple[int, ...], ...]

    @property
    def key_bits(self) -> int:
        return len(self.scheme.key)


def tree_packing_scheme(source: HypergraphicalSource, n: int) -> TreePacking:
    """Scheme with one key bit per spanning tree packed into the n-fold
    multigraph of a pairwise source."""
    if not is_pin(source):
        raise ValidationError("tree packing needs a source with all edges on two users")
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for inc in source.incidence:
            if v in inc:
                for w in inc:
                    if w not in seen:
                        seen.add(w)
                        frontier.append(w)
    if len(seen) != len(source.users):
        raise ValidationError("graph is disconnected; no spanning tree exists")
    instance = BitSourceInstance(source, n)
    elements = []
    for e, inc in enumerate(source.incidence):
        u, v = sorted(inc)
        for bit in instance.edge_bits(e):
            if bit != len(elements):
                raise InternalCheckError("bit layout out of sync with element list")
            elements.append((u, v))
    trees = _max_spanning_tree_packing(len(source.users), elements)
    key_rows = []
    transcript = []
    for tree in trees:
        key_row, rows = _tree_rows(instance, elements, tree)
        key_rows.append(key_row)
        transcript.extend(rows)
    scheme = LinearScheme(instance.total_bits, tuple(transcript), tuple(key_rows))
    report = verify(instance, scheme)
    if not report.ok:
        raise InternalCheckError("tree-packing scheme failed its own verification")
    return TreePacking(instance, scheme, tuple(tuple(sorted(t)) for t in trees))


# ---------------------------------------------------------------- binning --


@dataclass(frozen=True)
class RandomBinning:
    instance: BitSourceInstance
    scheme: LinearScheme
    achieved: bool
    rates: Mapping[str, Fraction]

    @property
    def key_bits(self) -> int:
        return len(self.scheme.key)


def random_binning_omniscience(source: HypergraphicalSource, n: int, seed: int) -> RandomBinning:
    """Random linear binning at the optimal discussion rates.

    Every user with positive rate r_i broadcasts ceil(n * r_i) random
    parities of its own bits, padded by ceil(2 * log2(m + 1)) extra rows to
    absorb rank defects.  `achieved` records whether all users can then
    reconstruct every source bit; the key is a basis of the source space
    modulo the transcript, so secrecy and uniformity hold by construction
    whenever the transcript rank is what the key assumes.
    """
    instance = BitSourceInstance(source, n)
    m = instance.total_bits
    witness = rco(source).witness
    rng = random.Random(seed)
    margin = math.ceil(2 * math.log2(m + 1))
    transcript = []
    for user in source.users:
        r = witness.rates[user]
        if r <= 0:
            continue
        obs = instance.user_mask(user)
        bits = [k for k in range(m) if obs >> k & 1]
        for _ in range(math.ceil(n * r) + margin):
            row = 0
            for b in bits:
                if rng.getrandbits(1):
                    row |= 1 << b
            transcript.append((row, user))
    a_basis = Gf2Basis(row for row, _ in transcript)
    achieved = True
    for user in source.users:
        basis = a_basis.copy()
        obs = instance.user_mask(user)
        for k in range(m):
            if obs >> k & 1:
                basis.add(1 << k)
        if basis.rank != m:
            achieved = False
            break
    key = tuple(complement_units(a_basis, m))
    scheme = LinearScheme(m, tuple(transcript), key)
    return RandomBinning(instance, scheme, achieved, dict(witness.rates))


# ------------------------------------------------------------------- json --


def scheme_to_json(scheme: LinearScheme) -> str:
    data = {
        "width": scheme.width,
        "transcript": [{"row": format(row, "x"), "speaker": sp} for row, sp in scheme.transcript],
        "key": [format(row, "x") for row in scheme.key],
    }
    return json.dumps(data, sort_keys=True)


def scheme_from_json(text: str) -> LinearScheme:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad scheme JSON: {exc}") from exc
    try:
        width = int(data["width"])
        transcript = tuple((int(item["row"], 16), item["speaker"]) for item in data["transcript"])
        key = tuple(int(row, 16) for row in data["key"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad scheme JSON structure: {exc}") from exc
    return LinearScheme(width, transcript, key)
