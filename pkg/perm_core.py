"""
Dense permutations on {0, ..., n-1} and the finitely generated groups they span.

Permutations are read-only one-line numpy arrays and act on the left:
compose(p, q)(x) = p(q(x)).
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from abelian import decompose
from core import CapExceeded, DegreeMismatch, NonAbelianGroup, NotAdmitted

logger = logging.getLogger(__name__)


class Permutation:
    __slots__ = ("images", "_key")

    def __init__(self, images):
        arr = np.array(images, dtype=np.int64).reshape(-1)
        n = len(arr)
        if n and (arr.min() < 0 or arr.max() >= n or len(np.unique(arr)) != n):
            raise ValueError(f"not a permutation of 0..{n - 1}: {arr.tolist()}")
        arr.flags.writeable = False
        self.images = arr
        self._key = arr.tobytes()

    @property
    def degree(self):
        return len(self.images)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Permutation) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self.images.tolist() < other.images.tolist()

    def __call__(self, x):
        return int(self.images[x])

    def __repr__(self):
        return f"Permutation({self.images.tolist()})"

    def __str__(self):
        cycles = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles) or "()"

    def cycles(self):
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for start in range(self.degree):
            if seen[start] or self.images[start] == start:
                continue
            cycle = [start]
            seen[start] = True
            x = int(self.images[start])
            while x != start:
                cycle.append(x)
                seen[x] = True
                x = int(self.images[x])
            out.append(cycle)
        return out

    @property
    def is_identity(self):
        return bool((self.images == np.arange(self.degree)).all())


def identity(n):
    return Permutation(np.arange(n))


def from_cycles(n, *cycles):
    images = np.arange(n)
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            images[a] = b
    return Permutation(images)


def compose(p, q):
    """p after q."""
    if p.degree != q.degree:
        raise DegreeMismatch(f"degrees differ: {p.degree} != {q.degree}")
    return Permutation(p.images[q.images])


def inverse(p):
    return Permutation(np.argsort(p.images))


def fixed_point_count(p):
    return int(np.count_nonzero(p.images == np.arange(p.degree)))


def order(p):
    out = 1
    for c in p.cycles():
        out = np.lcm(out, len(c))
    return int(out)


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple
    elements: tuple = field(repr=False)

    @property
    def order(self):
        return len(self.elements)

    def contains(self, p):
        return p.key in self._keys

    def __contains__(self, p):
        return self.contains(p)

    @property
    def _keys(self):
        keys = self.__dict__.get("_key_set")
        if keys is None:
            keys = frozenset(p.key for p in self.elements)
            object.__setattr__(self, "_key_set", keys)
        return keys

    def index_of(self):
        return {p.key: i for i, p in enumerate(self.elements)}


def _common_degree(gens, degree=None):
    degrees = {g.degree for g in gens}
    if degree is not None:
        degrees.add(degree)
    if len(degrees) > 1:
        raise DegreeMismatch(f"generators of mixed degree {sorted(degrees)}")
    return degrees.pop() if degrees else 0


def generate_closure(gens, cap=None, admit=None, degree=None):
    """
    Close the generators under composition with an unordered-pair queue.

    Every new element is paired with every current member, itself included.
    Raises CapExceeded as soon as the group would grow past `cap`, and
    NotAdmitted when `admit` rejects a newly found element.
    """
    gens = list(gens)
    n = _common_degree(gens, degree)
    members = {}
    pending = []

    def add(p):
        if p.key in members:
            return
        if cap is not None and len(members) + 1 > cap:
            raise CapExceeded(cap, len(members) + 1)
        if admit is not None and not admit(p):
            raise NotAdmitted(p)
        current = list(members.values())
        members[p.key] = p
        pending.append((p, p))
        pending.extend((p, q) for q in current)

    for g in gens:
        add(g)
    if not members:
        add(identity(n))
    while pending:
        a, b = pending.pop()
        add(compose(a, b))
        if a is not b:
            add(compose(b, a))
    logger.debug("closure of %d generators on %d points: %d elements", len(gens), n, len(members))
    return PermGroup(n, tuple(gens), tuple(sorted(members.values())))


def is_abelian_generators(gens):
    gens = list(gens)
    for i, p in enumerate(gens):
        for q in gens[i + 1:]:
            if compose(p, q) != compose(q, p):
                return False
    return True


def is_semiregular(group_or_gens, degree=None):
    """Every non-identity element is fixed-point free."""
    if isinstance(group_or_gens, PermGroup):
        group = group_or_gens
    else:
        gens = [g for g in group_or_gens if not g.is_identity]
        if any(fixed_point_count(g) for g in gens):
            return False
        try:
            group = generate_closure(gens, admit=is_regular_element, degree=degree)
        except NotAdmitted:
            return False
    return all(is_regular_element(p) for p in group.elements)


def is_regular_element(p):
    """Identity, or moves every point."""
    return p.is_identity or fixed_point_count(p) == 0


def orbits(group_or_gens, degree=None):
    """Orbits of the generated action as sorted lists, ordered by least element."""
    gens = group_or_gens.generators if isinstance(group_or_gens, PermGroup) else list(group_or_gens)
    n = _common_degree(gens, group_or_gens.degree if isinstance(group_or_gens, PermGroup) else degree)
    if not gens:
        return [[x] for x in range(n)]
    src = np.concatenate([np.arange(n)] * len(gens))
    dst = np.concatenate([g.images for g in gens])
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    blocks = {}
    for x, lab in enumerate(labels):
        blocks.setdefault(int(lab), []).append(x)
    return sorted(blocks.values(), key=lambda b: b[0])


@dataclass(frozen=True)
class AbelianStructure:
    group: object
    to_tuple: dict
    from_tuple: dict

    def coords(self, p):
        return self.to_tuple[p.key]

    def permutation(self, a):
        return self.from_tuple[tuple(a)]


def abstract_abelian_structure(group):
    """Invariant factors of an abelian PermGroup and the element bijection."""
    elems = group.elements
    if not is_abelian_generators(group.generators):
        raise NonAbelianGroup("permutation group is not abelian")
    index = group.index_of()
    stacked = np.stack([p.images for p in elems]) if elems else np.zeros((0, group.degree), np.int64)
    # row i lists elems[i] after elems[j]
    table = np.array(
        [[index[p.tobytes()] for p in stacked[i][stacked]] for i in range(len(elems))],
        dtype=np.int64,
    ).reshape(len(elems), len(elems))
    ident = index[identity(group.degree).key]
    dec = decompose(table, ident)
    abstract = dec.group
    to_tuple = {p.key: abstract.element(int(dec.rank_for_element[i])) for i, p in enumerate(elems)}
    from_tuple = {abstract.element(r): elems[int(dec.element_for_rank[r])] for r in range(abstract.order)}
    return AbelianStructure(abstract, to_tuple, from_tuple)
