"""Set partitions of {1..k}, the non-crossing lattice NC(k), and its Moebius function.

Partitions are stored in canonical form: blocks sorted by their minimum
element, elements ascending inside each block.  Equality and hashing are
structural, so partitions can index matrices and memo tables directly.
All operations are pure; memoization goes through `functools.lru_cache`,
which is internally synchronized, so concurrent read-only use is safe.
"""

from dataclasses import dataclass
from functools import lru_cache

from .errors import BoundError, DimensionError, DomainError

#: Default upper bound on ground-set size for enumeration (NC(8) has 1430
#: elements); every enumeration entry point accepts an explicit override.
K_MAX = 8


class SetPartition:
    """A partition of {1..k} into disjoint non-empty blocks."""

    __slots__ = ("ground_size", "blocks")

    def __init__(self, blocks, ground_size=None):
        cleaned = []
        seen = set()
        for block in blocks:
            b = tuple(sorted(set(block)))
            if not b:
                raise DomainError("empty block")
            if seen & set(b):
                raise DomainError(f"blocks are not disjoint: {blocks}")
            seen.update(b)
            cleaned.append(b)
        if not seen:
            raise BoundError("ground size 0 is not supported")
        k = max(seen) if ground_size is None else ground_size
        if seen != set(range(1, k + 1)):
            raise DomainError(f"blocks must cover 1..{k} exactly: {blocks}")
        cleaned.sort(key=lambda b: b[0])
        self.ground_size = k
        self.blocks = tuple(cleaned)

    @classmethod
    def singletons(cls, k):
        """The discrete partition 0_k."""
        return cls([(x,) for x in range(1, k + 1)])

    @classmethod
    def full(cls, k):
        """The one-block partition 1_k."""
        return cls([tuple(range(1, k + 1))])

    @classmethod
    def from_text(cls, text, ground_size=None):
        """Parse "1,8|2,7|3" form; any block/element order is accepted."""
        try:
            blocks = [[int(x) for x in part.split(",")] for part in text.split("|")]
        except ValueError as exc:
            raise DomainError(f"unparseable partition text: {text!r}") from exc
        flat = [x for b in blocks for x in b]
        if len(flat) != len(set(flat)):
            raise DomainError(f"duplicate element in partition text: {text!r}")
        if any(x < 1 for x in flat):
            raise DomainError(f"elements must be >= 1: {text!r}")
        if ground_size is not None and any(x > ground_size for x in flat):
            raise DomainError(f"element out of range 1..{ground_size}: {text!r}")
        return cls(blocks, ground_size=ground_size)

    def to_text(self):
        return "|".join(",".join(str(x) for x in b) for b in self.blocks)

    def block_count(self):
        return len(self.blocks)

    def block_containing(self, x):
        for b in self.blocks:
            if x in b:
                return b
        raise BoundError(f"{x} is not in 1..{self.ground_size}")

    def as_labels(self):
        """Block index (0-based) at each position 1..k."""
        out = [0] * self.ground_size
        for bi, b in enumerate(self.blocks):
            for x in b:
                out[x - 1] = bi
        return tuple(out)

    def sort_key(self):
        """Canonical enumeration key: finer partitions first."""
        return (self.ground_size - len(self.blocks), self.blocks)

    def __eq__(self, other):
        return (
            isinstance(other, SetPartition)
            and self.ground_size == other.ground_size
            and self.blocks == other.blocks
        )

    def __hash__(self):
        return hash((self.ground_size, self.blocks))

    def __repr__(self):
        return f"SetPartition({self.to_text()!r})"

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class NonCrossingCertificate:
    """Witness of non-crossingness: interval blocks removed one at a time."""

    partition: SetPartition
    peel_order: tuple  # of (block, (lo, hi)) pairs

    def replay(self):
        """Re-run the peel and confirm it empties the partition."""
        remaining = list(range(1, self.partition.ground_size + 1))
        for block, (lo, hi) in self.peel_order:
            if block[0] != lo or block[-1] != hi:
                return False
            inside = [x for x in remaining if lo <= x <= hi]
            if tuple(inside) != tuple(block):
                return False
            remaining = [x for x in remaining if x not in set(block)]
        return not remaining


def _require_same_ground(p, q):
    if p.ground_size != q.ground_size:
        raise DimensionError(
            f"ground sizes differ: {p.ground_size} vs {q.ground_size}"
        )


def _check_k(k, k_max=None):
    limit = K_MAX if k_max is None else k_max
    if not 1 <= k <= limit:
        raise BoundError(f"k={k} outside 1..{limit}")


def _blocks_cross(a, b):
    # Two disjoint blocks cross iff their merged position sequence
    # alternates a,b,a,b (three or more label changes).
    merged = sorted([(x, 0) for x in a] + [(x, 1) for x in b])
    changes = 0
    for (_, u), (_, v) in zip(merged, merged[1:]):
        if u != v:
            changes += 1
            if changes >= 3:
                return True
    return False


def is_noncrossing(p):
    """Pairwise test: no two blocks interleave."""
    blocks = p.blocks
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if _blocks_cross(blocks[i], blocks[j]):
                return False
    return True


def noncrossing_certificate(p):
    """Peel interval blocks recursively; None if the partition crosses.

    This is the recursive characterization of NC: a partition is
    non-crossing iff it has a block that is an interval of the remaining
    ground set, and removing it leaves a non-crossing partition.
    """
    remaining = list(range(1, p.ground_size + 1))
    blocks = list(p.blocks)
    peel = []
    while blocks:
        pos = {x: i for i, x in enumerate(remaining)}
        found = None
        for b in blocks:
            idx = [pos[x] for x in b]
            if idx[-1] - idx[0] == len(b) - 1:
                found = b
                break
        if found is None:
            return None
        peel.append((found, (found[0], found[-1])))
        blocks.remove(found)
        dead = set(found)
        remaining = [x for x in remaining if x not in dead]
    return NonCrossingCertificate(partition=p, peel_order=tuple(peel))


@lru_cache(maxsize=None)
def _all_partitions(k):
    # Restricted growth strings; blocks come out canonical (ordered by
    # first occurrence = ordered by minimum).
    results = []

    def extend(prefix, mx):
        if len(prefix) == k:
            nb = mx + 1
            blocks = [[] for _ in range(nb)]
            for pos, lab in enumerate(prefix, start=1):
                blocks[lab].append(pos)
            results.append(SetPartition(blocks))
            return
        for a in range(mx + 2):
            prefix.append(a)
            extend(prefix, max(mx, a))
            prefix.pop()

    extend([], -1)
    results.sort(key=SetPartition.sort_key)
    return tuple(results)


@lru_cache(maxsize=None)
def _all_nc(k):
    return tuple(p for p in _all_partitions(k) if is_noncrossing(p))


def enumerate_partitions(k, k_max=None):
    """All of P(k) in canonical order (finer first); |P(k)| = Bell(k)."""
    _check_k(k, k_max)
    return list(_all_partitions(k))


def enumerate_nc(k, k_max=None):
    """All of NC(k) in canonical order; |NC(k)| = Catalan(k)."""
    _check_k(k, k_max)
    return list(_all_nc(k))


def leq(p, q):
    """Refinement order: every block of p lies inside a block of q."""
    _require_same_ground(p, q)
    where = {}
    for bi, b in enumerate(q.blocks):
        for x in b:
            where[x] = bi
    for b in p.blocks:
        target = where[b[0]]
        if any(where[x] != target for x in b[1:]):
            return False
    return True


def join(p, q):
    """Least upper bound in P(k): transitive closure of the union of the
    block relations.  Not restricted to NC(k) even for non-crossing inputs."""
    _require_same_ground(p, q)
    k = p.ground_size
    parent = list(range(k + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (p, q):
        for b in part.blocks:
            root = find(b[0])
            for x in b[1:]:
                rx = find(x)
                if rx != root:
                    parent[rx] = root
    groups = {}
    for x in range(1, k + 1):
        groups.setdefault(find(x), []).append(x)
    return SetPartition(groups.values(), ground_size=k)


def meet(p, q):
    """Greatest lower bound in P(k): blockwise intersections."""
    _require_same_ground(p, q)
    blocks = []
    for a in p.blocks:
        sa = set(a)
        for b in q.blocks:
            c = sa & set(b)
            if c:
                blocks.append(c)
    return SetPartition(blocks, ground_size=p.ground_size)


def kernel(indices):
    """Partition of positions {1..k} grouping equal symbols."""
    items = list(indices)
    if not items:
        raise BoundError("kernel of an empty tuple")
    groups = {}
    for pos, sym in enumerate(items, start=1):
        groups.setdefault(sym, []).append(pos)
    return SetPartition(groups.values(), ground_size=len(items))


@lru_cache(maxsize=None)
def _nc_order_data(k):
    """(partitions, index map, up-sets as bitmasks) for NC(k)."""
    nc = _all_nc(k)
    pos = {p: i for i, p in enumerate(nc)}
    up = []
    for p in nc:
        mask = 0
        for j, q in enumerate(nc):
            if leq(p, q):
                mask |= 1 << j
        up.append(mask)
    return nc, pos, tuple(up)


@lru_cache(maxsize=None)
def _mobius_row(k, a):
    """mu_k(nc[a], nc[b]) for all b, computed by the defining recursion
    sum_{p <= t <= q} mu(p, t) = [p == q], walking the up-set of nc[a]
    from finer to coarser (the enumeration order)."""
    nc, _, up = _nc_order_data(k)
    row = [0] * len(nc)
    row[a] = 1
    mask = up[a]
    for b in range(a + 1, len(nc)):
        if not (mask >> b) & 1:
            continue
        s = 0
        bit = up_down_interval(k, a, b)
        while bit:
            t = (bit & -bit).bit_length() - 1
            if t != b:
                s += row[t]
            bit &= bit - 1
        row[b] = -s
    return tuple(row)


@lru_cache(maxsize=None)
def _down_masks(k):
    nc, _, up = _nc_order_data(k)
    down = [0] * len(nc)
    for a in range(len(nc)):
        mask = up[a]
        bit = mask
        while bit:
            b = (bit & -bit).bit_length() - 1
            down[b] |= 1 << a
            bit &= bit - 1
    return tuple(down)


def up_down_interval(k, a, b):
    """Bitmask of NC(k) indices t with nc[a] <= t <= nc[b]."""
    _, _, up = _nc_order_data(k)
    return up[a] & _down_masks(k)[b]


def _require_nc(p):
    if not is_noncrossing(p):
        raise DomainError(f"partition is not non-crossing: {p}")


def mobius_nc(p, q):
    """Moebius function of the lattice NC(k), by memoized recursion."""
    _require_same_ground(p, q)
    _require_nc(p)
    _require_nc(q)
    if not leq(p, q):
        return 0
    k = p.ground_size
    _, pos, _ = _nc_order_data(k)
    return _mobius_row(k, pos[p])[pos[q]]


def mobius_nc_chain_count(p, q):
    """Moebius value by the alternating count of strict chains p < v1 < ... < vl < q.

    Exponential-cost cross-check of mobius_nc; chains live in the finite
    open interval, so their length is implicitly bounded by |p| - |q| - 1.
    """
    _require_same_ground(p, q)
    _require_nc(p)
    _require_nc(q)
    if p == q:
        return 1
    if not leq(p, q):
        return 0
    k = p.ground_size
    nc, pos, up = _nc_order_data(k)
    inner = up_down_interval(k, pos[p], pos[q]) & ~(1 << pos[p]) & ~(1 << pos[q])
    members = []
    bit = inner
    while bit:
        members.append((bit & -bit).bit_length() - 1)
        bit &= bit - 1

    # h(v) = (alternating-sign count of chains starting at v) satisfies
    # h(v) = 1 - sum_{w > v in the open interval} h(w).
    h = {}

    def signed_chains_from(v):
        if v in h:
            return h[v]
        s = 1
        for w in members:
            if w != v and (up[v] >> w) & 1:
                s -= signed_chains_from(w)
        h[v] = s
        return s

    return -1 + sum(signed_chains_from(v) for v in members)
