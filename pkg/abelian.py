"""
Finite abelian groups in cyclic-decomposition form and their homomorphisms.

A group is a direct sum Z_{m_1} + ... + Z_{m_r}; elements are residue tuples.
Homomorphisms are integer matrices acting on tuples, reduced modulo the target
moduli. Everything here is exhaustive: the groups handled by the toolkit have
at most a few hundred elements.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from sympy import factorint
from sympy.utilities.iterables import partitions

from core import GroupMapError, GuardExceeded, resolve_guards

logger = logging.getLogger(__name__)


def _readonly(arr):
    arr.flags.writeable = False
    return arr


class FiniteAbelianGroup:
    """Z_{m_1} + ... + Z_{m_r} with elements as residue tuples."""

    def __init__(self, moduli):
        moduli = tuple(int(m) for m in moduli)
        if any(m < 1 for m in moduli):
            raise ValueError(f"moduli must be positive, got {moduli}")
        self.moduli = moduli
        self.rank = len(moduli)
        self.order = math.prod(moduli)
        self._mods = _readonly(np.array(moduli, dtype=np.int64))
        strides = [math.prod(moduli[i + 1:]) for i in range(self.rank)]
        self._strides = _readonly(np.array(strides, dtype=np.int64))

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.moduli == other.moduli

    def __hash__(self):
        return hash(("FiniteAbelianGroup", self.moduli))

    def __repr__(self):
        return f"FiniteAbelianGroup({self.moduli})"

    def __str__(self):
        if not self.moduli:
            return "Z_1"
        return " x ".join(f"Z_{m}" for m in self.moduli)

    @property
    def zero(self):
        return (0,) * self.rank

    @property
    def is_cyclic(self):
        return self.canonical_form()[0].rank <= 1

    @property
    def is_invariant_form(self):
        if any(m < 2 for m in self.moduli):
            return False
        return all(b % a == 0 for a, b in zip(self.moduli, self.moduli[1:]))

    @cached_property
    def elements(self):
        """All elements as an (order, rank) array, lexicographic (= rank order)."""
        rows = list(itertools.product(*(range(m) for m in self.moduli)))
        return _readonly(np.array(rows, dtype=np.int64).reshape(self.order, self.rank))

    def element(self, r):
        return tuple(int(v) for v in self.elements[r])

    def normalize(self, a):
        a = tuple(int(v) for v in a)
        if len(a) != self.rank:
            raise GroupMapError(f"element {a} does not belong to {self}")
        return tuple(v % m for v, m in zip(a, self.moduli))

    def contains(self, a):
        return len(a) == self.rank and all(0 <= v < m for v, m in zip(a, self.moduli))

    def reduce(self, arr):
        return np.asarray(arr, dtype=np.int64) % self._mods

    def add(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def sub(self, a, b):
        return tuple((x - y) % m for x, y, m in zip(a, b, self.moduli))

    def scale(self, t, a):
        return tuple((t * x) % m for x, m in zip(a, self.moduli))

    def element_order(self, a):
        return math.lcm(1, *(m // math.gcd(x, m) for x, m in zip(a, self.moduli)))

    def rank_of(self, a):
        return int(np.dot(np.asarray(a, dtype=np.int64), self._strides)) if self.rank else 0

    def ranks(self, arr):
        arr = np.asarray(arr, dtype=np.int64)
        if self.rank == 0:
            return np.zeros(arr.shape[:-1], dtype=np.int64)
        return arr @ self._strides

    @cached_property
    def addition_table(self):
        e = self.elements
        return _readonly(self.ranks(self.reduce(e[:, None, :] + e[None, :, :])))

    def basis(self):
        return [tuple(1 if i == j else 0 for i in range(self.rank)) for j in range(self.rank)]

    def canonical_form(self):
        """(invariant-form group, isomorphism self -> canonical, its inverse)."""
        return _canonical_form(self)


@dataclass(frozen=True)
class Decomposition:
    group: FiniteAbelianGroup
    element_for_rank: np.ndarray   # canonical rank -> input index
    rank_for_element: np.ndarray   # input index -> canonical rank


def decompose(table, zero=0):
    """
    Invariant-factor decomposition of an abstract finite abelian group.

    `table` is the addition table over indices 0..N-1. Repeatedly takes an
    element of maximal order, decomposes the quotient by the cyclic subgroup it
    generates and lifts the quotient generators back with corrected orders.
    """
    table = np.asarray(table, dtype=np.int64)
    moduli, generators = _decompose(table, int(zero))
    group = FiniteAbelianGroup(moduli)
    # lexicographic tuples: earlier coordinates are the outer loop
    points = [int(zero)]
    for gen, m in zip(generators, moduli):
        steps = _multiples(table, zero, gen, m)
        points = [int(table[p, s]) for p in points for s in steps]
    element_for_rank = np.array(points, dtype=np.int64)
    if len(set(points)) != len(table):
        raise GroupMapError("addition table does not describe a finite abelian group")
    rank_for_element = np.empty_like(element_for_rank)
    rank_for_element[element_for_rank] = np.arange(len(points))
    return Decomposition(group, _readonly(element_for_rank), _readonly(rank_for_element))


def _multiples(table, zero, x, count):
    out = [int(zero)]
    for _ in range(count - 1):
        out.append(int(table[out[-1], x]))
    return out


def _orders(table, zero):
    n = len(table)
    orders = np.zeros(n, dtype=np.int64)
    cur = np.arange(n)
    step = 1
    while (orders == 0).any():
        hit = (cur == zero) & (orders == 0)
        orders[hit] = step
        cur = table[cur, np.arange(n)]
        step += 1
        if step > n + 1:
            raise GroupMapError("addition table has an element of unbounded order")
    return orders


def _decompose(table, zero):
    n = len(table)
    if n == 1:
        return (), []
    orders = _orders(table, zero)
    g = int(np.argmax(orders))
    m = int(orders[g])
    cyclic = _multiples(table, zero, g, m)
    labels = table[:, cyclic].min(axis=1)
    reps = np.unique(labels)
    position = {int(r): i for i, r in enumerate(reps)}
    qtable = np.array([[position[int(labels[table[a, b]])] for b in reps] for a in reps], dtype=np.int64)
    qmoduli, qgens = _decompose(qtable, position[int(labels[zero])])
    where = {c: t for t, c in enumerate(cyclic)}
    lifted = []
    for qg, k in zip(qgens, qmoduli):
        y = int(reps[qg])
        ky = _multiples(table, zero, y, k + 1)[k]
        j = where[ky]
        if j % k:
            raise GroupMapError("addition table is not abelian")
        lifted.append(int(table[y, cyclic[(m - j // k) % m]]))
    return tuple(qmoduli) + (m,), lifted + [g]


def _canonical_form(group):
    dec = decompose(group.addition_table, 0)
    canon = dec.group
    to_canon = [canon.element(int(dec.rank_for_element[group.rank_of(e)])) for e in group.basis()]
    from_canon = [group.element(int(dec.element_for_rank[canon.rank_of(e)])) for e in canon.basis()]
    iso = GroupMap.from_images(group, canon, to_canon)
    inv = GroupMap.from_images(canon, group, from_canon)
    return canon, iso, inv


class GroupMap:
    """Homomorphism source -> target given by an integer matrix on tuples."""

    def __init__(self, source, target, matrix):
        m = np.array(matrix, dtype=np.int64).reshape(target.rank, source.rank)
        tmods = target._mods[:, None]
        if target.rank and source.rank:
            m = m % tmods
            if ((m * source._mods[None, :]) % tmods).any():
                raise GroupMapError(f"matrix does not define a map {source} -> {target}")
        self.source = source
        self.target = target
        self.matrix = _readonly(m)

    @classmethod
    def from_images(cls, source, target, images):
        images = [target.normalize(x) for x in images]
        if len(images) != source.rank:
            raise GroupMapError(f"need {source.rank} basis images, got {len(images)}")
        matrix = np.array(images, dtype=np.int64).reshape(source.rank, target.rank).T
        return cls(source, target, matrix)

    @classmethod
    def identity(cls, group):
        return cls(group, group, np.eye(group.rank, dtype=np.int64))

    @classmethod
    def scalar(cls, group, c):
        return cls(group, group, c * np.eye(group.rank, dtype=np.int64))

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, np.zeros((target.rank, source.rank), dtype=np.int64))

    @property
    def key(self):
        return (self.source.moduli, self.target.moduli, self.matrix.tobytes())

    def __eq__(self, other):
        return isinstance(other, GroupMap) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"GroupMap({self.source} -> {self.target}, {self.matrix.tolist()})"

    def __call__(self, a):
        if self.target.rank == 0:
            return ()
        v = self.matrix @ np.asarray(a, dtype=np.int64).reshape(self.source.rank)
        return tuple(int(x) for x in v % self.target._mods)

    def apply_all(self, arr):
        arr = np.asarray(arr, dtype=np.int64)
        return self.target.reduce(arr @ self.matrix.T)

    @cached_property
    def table(self):
        """Rank of the image of every source element, in source rank order."""
        return _readonly(self.target.ranks(self.apply_all(self.source.elements)))

    def compose(self, other):
        """self after other."""
        if other.target != self.source:
            raise GroupMapError("cannot compose: target/source mismatch")
        return GroupMap(other.source, self.target, self.matrix @ other.matrix)

    __matmul__ = compose

    def __sub__(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise GroupMapError("cannot subtract maps with different domains")
        return GroupMap(self.source, self.target, self.matrix - other.matrix)

    def __add__(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise GroupMapError("cannot add maps with different domains")
        return GroupMap(self.source, self.target, self.matrix + other.matrix)

    @property
    def is_endomorphism(self):
        return self.source == self.target

    def is_bijective(self):
        return self.source.order == self.target.order and len(np.unique(self.table)) == self.target.order

    def inverse(self):
        if not self.is_bijective():
            raise GroupMapError("map is not invertible")
        preimage = np.empty(self.source.order, dtype=np.int64)
        preimage[self.table] = np.arange(self.source.order)
        cols = [self.source.element(int(preimage[self.target.rank_of(e)])) for e in self.target.basis()]
        return GroupMap.from_images(self.target, self.source, cols)

    def power(self, e):
        out = GroupMap.identity(self.source)
        for _ in range(e):
            out = self.compose(out)
        return out


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteAbelianGroup
    generators: tuple
    elements: frozenset

    @property
    def order(self):
        return len(self.elements)

    @property
    def index(self):
        return self.parent.order // self.order

    def __contains__(self, a):
        return tuple(a) in self.elements

    def __len__(self):
        return len(self.elements)

    @cached_property
    def ranks(self):
        return _readonly(np.array(sorted(self.parent.rank_of(a) for a in self.elements), dtype=np.int64))

    def as_group(self):
        """(abstract group S', inclusion S' -> parent, parent rank -> S' tuple)."""
        ranks = self.ranks
        position = {int(r): i for i, r in enumerate(ranks)}
        add = self.parent.addition_table
        table = np.array([[position[int(add[a, b])] for b in ranks] for a in ranks], dtype=np.int64)
        dec = decompose(table, position[0])
        group = dec.group
        images = [self.parent.element(int(ranks[dec.element_for_rank[group.rank_of(e)]])) for e in group.basis()]
        inclusion = GroupMap.from_images(group, self.parent, images)
        coords = {int(r): group.element(int(dec.rank_for_element[i])) for i, r in enumerate(ranks)}
        return group, inclusion, coords


def subgroup_generated(group, gens):
    gens = tuple(group.normalize(g) for g in gens)
    current = {group.zero}
    for g in gens:
        if g in current:
            continue
        steps = [group.scale(t, g) for t in range(group.element_order(g))]
        current = {group.add(s, t) for s in current for t in steps}
    return Subgroup(group, gens, frozenset(current))


def one_minus(f):
    """The map x -> x - f(x)."""
    if not f.is_endomorphism:
        raise GroupMapError("1 - f needs an endomorphism")
    return GroupMap.identity(f.source) - f


def image(f):
    elems = {tuple(int(v) for v in row) for row in f.apply_all(f.source.elements)}
    return Subgroup(f.target, tuple(f(e) for e in f.source.basis()), frozenset(elems))


def kernel(f):
    zero_rank = 0
    hit = np.flatnonzero(f.table == zero_rank)
    elems = frozenset(f.source.element(int(r)) for r in hit)
    return Subgroup(f.source, tuple(sorted(elems)), elems)


def is_automorphism(f):
    return f.is_endomorphism and f.is_bijective()


def intersection(s, t):
    if s.parent != t.parent:
        raise GroupMapError("subgroups of different groups")
    elems = s.elements & t.elements
    return Subgroup(s.parent, tuple(sorted(elems)), elems)


def coset_key(group, sub):
    """Array mapping each element rank to the least rank in its coset."""
    labels = np.full(group.order, -1, dtype=np.int64)
    members = group.elements[sub.ranks]
    for r in range(group.order):
        if labels[r] >= 0:
            continue
        coset = group.ranks(group.reduce(group.elements[r] + members))
        labels[coset] = r
    return _readonly(labels)


def cosets(group, sub):
    labels = coset_key(group, sub)
    out = {}
    for r, lab in enumerate(labels):
        out.setdefault(int(lab), []).append(group.element(r))
    return [out[k] for k in sorted(out)]


def transversal(group, sub):
    return [c[0] for c in cosets(group, sub)]


@dataclass(frozen=True)
class Quotient:
    group: FiniteAbelianGroup
    projection: GroupMap
    lift: tuple
    subgroup: Subgroup
    labels: np.ndarray


def quotient_structure(group, sub):
    labels = coset_key(group, sub)
    reps = np.unique(labels)
    position = {int(r): i for i, r in enumerate(reps)}
    add = group.addition_table
    table = np.array([[position[int(labels[add[a, b]])] for b in reps] for a in reps], dtype=np.int64)
    dec = decompose(table, position[0])
    q = dec.group
    cols = [q.element(int(dec.rank_for_element[position[int(labels[group.rank_of(e)])]])) for e in group.basis()]
    projection = GroupMap.from_images(group, q, cols)
    lift = tuple(group.element(int(reps[dec.element_for_rank[r]])) for r in range(q.order))
    return Quotient(q, projection, lift, sub, labels)


def induced_on_quotient(psi, quotient):
    """psi / S as an automorphism of A / S; S must be psi-invariant."""
    sub = quotient.subgroup
    if any(psi(s) not in sub for s in sub.generators):
        raise GroupMapError("subgroup is not invariant under the map")
    q = quotient.group
    cols = [quotient.projection(psi(quotient.lift[q.rank_of(e)])) for e in q.basis()]
    return GroupMap.from_images(q, q, cols)


@dataclass(frozen=True)
class MultitransversalCheck:
    is_multitransversal: bool
    multiplicity: int
    counts: dict


def is_multitransversal(group, d, sub):
    """Does the multiset d meet every coset of sub equally often?"""
    labels = coset_key(group, sub)
    counts = {int(lab): 0 for lab in np.unique(labels)}
    for x in d:
        counts[int(labels[group.rank_of(group.normalize(x))])] += 1
    values = set(counts.values())
    if len(values) == 1:
        return MultitransversalCheck(True, values.pop(), counts)
    return MultitransversalCheck(False, 0, counts)


def multitransversal_image_check(group, phi, trans):
    """
    Multiplicity of phi(T) as a multitransversal of Im phi / Im phi^2.

    T must be a transversal of A / Im phi; the count is cross-checked against
    |Ker phi / (Ker phi & Im phi)|.
    """
    im = image(phi)
    labels = coset_key(group, im)
    keys = [int(labels[group.rank_of(group.normalize(t))]) for t in trans]
    if len(keys) != im.index or len(set(keys)) != len(keys):
        raise GroupMapError("T is not a transversal of A / Im phi")
    im2 = image(phi.compose(phi))
    labels2 = coset_key(group, im2)
    counts = {int(labels2[group.rank_of(a)]): 0 for a in im.elements}
    for t in trans:
        counts[int(labels2[group.rank_of(phi(t))])] += 1
    values = set(counts.values())
    if len(values) != 1:
        raise ArithmeticError("phi(T) is not a multitransversal of Im phi / Im phi^2")
    mult = values.pop()
    ker = kernel(phi)
    expected = ker.order // intersection(ker, im).order
    if mult != expected:
        raise ArithmeticError(f"multiplicity {mult} differs from |Ker/(Ker & Im)| = {expected}")
    return mult


def automorphism_group(group, guards=None):
    """Every automorphism of the group, built column by column."""
    guards = resolve_guards(guards)
    guards.check("automorphism_order", group.order)
    return list(_automorphisms(group.moduli, guards))


@lru_cache(maxsize=64)
def _automorphisms(moduli, guards):
    group = FiniteAbelianGroup(moduli)
    elems = group.elements
    add = group.addition_table
    candidates = []
    for m in group.moduli:
        ok = ~group.reduce(m * elems).any(axis=1) if group.rank else np.ones(group.order, bool)
        candidates.append([int(r) for r in np.flatnonzero(ok)])
    found = []

    def extend(cols, span):
        j = len(cols)
        if j == group.rank:
            found.append(GroupMap.from_images(group, group, [group.element(c) for c in cols]))
            if len(found) > guards.max_automorphisms:
                raise GuardExceeded("max_automorphisms", guards.max_automorphisms, len(found))
            return
        m = group.moduli[j]
        span_set = set(span)
        for x in candidates[j]:
            multiples = [0]
            for _ in range(m - 1):
                multiples.append(int(add[multiples[-1], x]))
            if any(t in span_set for t in multiples[1:]):
                continue
            extend(cols + [x], [int(add[s, t]) for s in span for t in multiples])

    extend([], [0])
    logger.debug("|Aut(%s)| = %d", group, len(found))
    return tuple(found)


def _conj_key(g, f, ginv, mods):
    return ((g.matrix @ f.matrix @ ginv.matrix) % mods).tobytes()


def generating_set(auts):
    """A small subset of a finite group of maps that generates all of it."""
    if not auts:
        return []
    mods = auts[0].target._mods[:, None]
    span = {GroupMap.identity(auts[0].source).matrix.tobytes(): GroupMap.identity(auts[0].source).matrix}
    gens = []
    for g in auts:
        if g.matrix.tobytes() in span:
            continue
        gens.append(g)
        frontier = list(span.values())
        while frontier:
            nxt = []
            for m in frontier:
                for h in gens:
                    prod = (m @ h.matrix) % mods
                    key = prod.tobytes()
                    if key not in span:
                        span[key] = prod
                        nxt.append(prod)
            frontier = nxt
    return gens


def conjugacy_classes(auts):
    """Class representatives, each the first member in the given order."""
    if not auts:
        return []
    mods = auts[0].target._mods[:, None]
    gens = generating_set(auts)
    conjugators = [(g, g.inverse()) for g in gens]
    seen = set()
    reps = []
    for f in auts:
        if f.matrix.tobytes() in seen:
            continue
        reps.append(f)
        seen.add(f.matrix.tobytes())
        frontier = [f]
        while frontier:
            nxt = []
            for h in frontier:
                for g, ginv in conjugators:
                    key = _conj_key(g, h, ginv, mods)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(GroupMap(h.source, h.target, np.frombuffer(key, dtype=np.int64)))
            frontier = nxt
    return reps


def centralizer(auts, f):
    mods = f.target._mods[:, None]
    fm = f.matrix
    return [g for g in auts if not (((g.matrix @ fm) - (fm @ g.matrix)) % mods).any()]


def abelian_groups(m):
    """One group per isomorphism class of order m, invariant-factor form."""
    if m < 1:
        raise ValueError("order must be positive")
    if m == 1:
        return [FiniteAbelianGroup(())]
    per_prime = []
    for p, e in sorted(factorint(m).items()):
        options = []
        for part in partitions(e):
            options.append(sorted((size for size, mult in part.items() for _ in range(mult)), reverse=True))
        per_prime.append((p, options))
    groups = []
    for choice in itertools.product(*(opts for _, opts in per_prime)):
        factors = [1] * max(len(c) for c in choice)
        for (p, _), parts in zip(per_prime, choice):
            for i, a in enumerate(parts):
                factors[i] *= p ** a
        groups.append(FiniteAbelianGroup(sorted(factors)))
    return sorted(groups, key=lambda g: (g.rank, g.moduli))


def restrict(f, sub):
    """f restricted to an f-invariant subgroup, on the abstract subgroup."""
    group, inclusion, coords = sub.as_group()
    images = []
    for e in group.basis():
        y = f(inclusion(e))
        if y not in sub:
            raise GroupMapError("subgroup is not invariant under the map")
        images.append(coords[f.target.rank_of(y)])
    return group, GroupMap.from_images(group, group, images)
