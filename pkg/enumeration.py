"""
Counting quasi-affine quandles of a given order up to isomorphism.

A quasi-affine quandle of order n is an indecomposable extension Ext(A, f, d)
with k | n fibres over an abelian group A of order n/k and an automorphism f
taken up to conjugacy. For fixed (k, A, f) the extensions are counted as
orbits of count vectors over A / Im(1-f) under translations and the maps
induced by the centralizer of f.
"""
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from sympy import divisors, factorint, isprime

from abelian import (
    FiniteAbelianGroup,
    GroupMap,
    abelian_groups,
    automorphism_group,
    centralizer,
    conjugacy_classes,
    generating_set,
    image,
    induced_on_quotient,
    is_automorphism,
    kernel,
    one_minus,
    quotient_structure,
    subgroup_generated,
)
from constructions import ExtensionDescriptor
from core import GroupMapError, resolve_guards
from quandle_core import FiniteQuandle, axiom_violations, brute_force_isomorphism

logger = logging.getLogger(__name__)


def compositions(k, parts):
    """All tuples of `parts` non-negative integers summing to k, lexicographic."""
    if parts == 0:
        return [()] if k == 0 else []
    out = []
    for bars in itertools.combinations(range(k + parts - 1), parts - 1):
        edges = (-1,) + bars + (k + parts - 1,)
        out.append(tuple(b - a - 1 for a, b in zip(edges, edges[1:])))
    return sorted(out)


def vector_is_indecomposable(group, counts):
    support = [group.element(r) for r, c in enumerate(counts) if c]
    diffs = [group.sub(s, support[0]) for s in support[1:]]
    return subgroup_generated(group, diffs).order == group.order


def count_vectors(group, k, indecomposable_only=True):
    vectors = compositions(k, group.order)
    if indecomposable_only:
        vectors = [v for v in vectors if vector_is_indecomposable(group, v)]
    return vectors


def cyclic_count_vector_total(m, k):
    """C(m+k-1, m-1) - m: count vectors over Z_m that are not concentrated in one point."""
    return math.comb(m + k - 1, m - 1) - m


@dataclass(frozen=True)
class CountVector:
    quotient: object
    counts: tuple

    @property
    def is_indecomposable(self):
        return vector_is_indecomposable(self.quotient.group, self.counts)

    @property
    def is_balanced(self):
        return len(set(self.counts)) == 1

    def d(self):
        """Least coset representatives, each repeated by its count."""
        out = []
        for r, c in enumerate(self.counts):
            out.extend([self.quotient.lift[r]] * c)
        return tuple(out)


def _rank_permutation(group, fn):
    return np.array([group.rank_of(fn(group.element(r))) for r in range(group.order)], dtype=np.int64)


def _orbit_representatives(vectors, perms):
    """Lexicographically least member of every orbit, in sorted order."""
    classes = DisjointSet(vectors)
    for v in vectors:
        arr = np.array(v, dtype=np.int64)
        for perm in perms:
            moved = np.empty_like(arr)
            moved[perm] = arr
            classes.merge(v, tuple(int(c) for c in moved))
    return sorted(min(subset) for subset in classes.subsets())


def _require_automorphism(group, f):
    if f.source != group or not is_automorphism(f):
        raise GroupMapError(f"f is not an automorphism of {group}")


def epsilon_vectors(group, f, k, guards=None):
    """Canonical count vectors, one per isomorphism class of Ext(A, f, -) with k fibres."""
    _require_automorphism(group, f)
    guards = resolve_guards(guards)
    quotient = quotient_structure(group, image(one_minus(f)))
    bar = quotient.group
    vectors = count_vectors(bar, k)
    if len(vectors) <= 1:
        return [CountVector(quotient, v) for v in vectors]
    perms = [_rank_permutation(bar, lambda a, b=b: bar.add(a, b)) for b in bar.basis()]
    cent = centralizer(automorphism_group(group, guards), f)
    induced = {}
    for psi in generating_set(cent):
        psi_bar = induced_on_quotient(psi, quotient)
        induced.setdefault(psi_bar.key, psi_bar)
    perms += [_rank_permutation(bar, m) for m in induced.values()]
    reps = _orbit_representatives(vectors, perms)
    return [CountVector(quotient, v) for v in reps]


def epsilon(group, f, k, guards=None):
    """Number of isomorphism classes of indecomposable extensions over (A, f) with k fibres."""
    return len(epsilon_vectors(group, f, k, guards))


def epsilon_classes(group, f, k, guards=None):
    return [ExtensionDescriptor(group, f, v.d()) for v in epsilon_vectors(group, f, k, guards)]


def burnside_epsilon(group, k, guards=None):
    """epsilon(A, 1, k) as the average number of fixed count vectors over the holomorph."""
    auts = automorphism_group(group, resolve_guards(guards))
    vectors = np.array(count_vectors(group, k), dtype=np.int64).reshape(-1, group.order)
    total = 0
    for psi in auts:
        for b in range(group.order):
            shift = group.element(b)
            perm = _rank_permutation(group, lambda a: group.add(psi(a), shift))
            total += int((vectors[:, perm] == vectors).all(axis=1).sum())
    size = group.order * len(auts)
    if total % size:
        raise ArithmeticError("Burnside sum is not divisible by the group order")
    return total // size


def _mod6_correction(k):
    return {0: 4, 3: 1, 2: 0, 4: 0, 1: -3, 5: -3}[k % 6]


def epsilon_closed_form(group, f, k):
    """Known formulas for epsilon; ValueError when none applies."""
    f = f if isinstance(f, GroupMap) else GroupMap.scalar(group, int(f))
    _require_automorphism(group, f)
    if image(one_minus(f)).order == group.order:
        return 1
    if f != GroupMap.identity(group):
        raise ValueError("no closed form for f other than 1 when 1 - f is not onto")
    canon = group.canonical_form()[0].moduli
    if k == 2:
        return 1 if len(canon) <= 1 else 0
    if canon == (2,):
        return k // 2
    if canon == (3,):
        return (k * k + 6 * k - 4 + _mod6_correction(k)) // 12
    known = {((4,), 3): 2, ((5,), 3): 2, ((2, 2), 3): 1}
    if (canon, k) in known:
        return known[canon, k]
    raise ValueError(f"no closed form for epsilon({group}, 1, {k})")


def _eps_cyclic(p, k):
    group = FiniteAbelianGroup((p,))
    try:
        return epsilon_closed_form(group, 1, k)
    except ValueError:
        return epsilon(group, GroupMap.identity(group), k)


def closed_form_order_counts(n):
    """Quasi-affine counts for orders p, p^2 and pq."""
    factors = factorint(n)
    if len(factors) == 1 and list(factors.values()) == [1]:
        return n - 1
    if len(factors) == 1 and list(factors.values()) == [2]:
        (p,) = factors
        return 2 * p * p - 2 * p - 2 + _eps_cyclic(p, p)
    if len(factors) == 2 and set(factors.values()) == {1}:
        p, q = sorted(factors)
        return p * q - p - q + 1 + _eps_cyclic(p, q) + _eps_cyclic(q, p)
    raise ValueError(f"{n} is not of the form p, p^2 or pq")


def quasi_affine_count_2p(p):
    if p < 3 or not isprime(p):
        raise ValueError("p must be an odd prime")
    return (3 * p - 1) // 2


@dataclass(frozen=True)
class QuandleClass:
    descriptor: ExtensionDescriptor
    counts: tuple
    affine: bool
    latin: bool


@dataclass(frozen=True)
class EnumerationCell:
    k: int
    group: FiniteAbelianGroup
    f: GroupMap
    classes: tuple = field(repr=False)

    @property
    def count(self):
        return len(self.classes)

    @property
    def affine_count(self):
        return sum(c.affine for c in self.classes)

    @property
    def latin_count(self):
        return sum(c.latin for c in self.classes)

    @property
    def sort_key(self):
        return (self.k, self.group.rank, self.group.moduli, self.f.matrix.tolist())

    def to_dict(self):
        return {
            "k": self.k,
            "group": list(self.group.moduli),
            "f": self.f.matrix.tolist(),
            "count": self.count,
            "affine": self.affine_count,
            "latin": self.latin_count,
        }


def run_cell(k, moduli, matrix, guards=None):
    group = FiniteAbelianGroup(moduli)
    f = GroupMap(group, group, matrix)
    latin_group = kernel(one_minus(f)).order == 1
    classes = []
    for v in epsilon_vectors(group, f, k, guards):
        desc = ExtensionDescriptor(group, f, v.d())
        classes.append(QuandleClass(desc, v.counts, v.is_balanced, k == 1 and latin_group))
    logger.debug("cell k=%d A=%s f=%s: %d classes", k, group, f.matrix.tolist(), len(classes))
    return EnumerationCell(k, group, f, tuple(classes))


def _run_cell_task(task):
    return run_cell(*task)


@dataclass(frozen=True)
class Enumeration:
    n: int
    cells: tuple

    @property
    def total(self):
        return sum(c.count for c in self.cells)

    @property
    def affine(self):
        return sum(c.affine_count for c in self.cells)

    @property
    def latin(self):
        return sum(c.latin_count for c in self.cells)

    def breakdown(self, kind="quasi-affine"):
        """Counts per number of orbits k, for every divisor k of n."""
        attr = {"quasi-affine": "count", "affine": "affine_count", "latin": "latin_count"}[kind]
        out = {k: 0 for k in divisors(self.n)}
        for cell in self.cells:
            out[cell.k] += getattr(cell, attr)
        return out

    def total_for(self, kind):
        return sum(self.breakdown(kind).values())

    def classes(self, kind="quasi-affine"):
        for cell in self.cells:
            for cls in cell.classes:
                if kind == "quasi-affine" or (kind == "affine" and cls.affine) or (kind == "latin" and cls.latin):
                    yield cls


def enumeration_tasks(n, guards):
    tasks = []
    for k in divisors(n):
        for group in abelian_groups(n // k):
            for f in conjugacy_classes(automorphism_group(group, guards)):
                tasks.append((k, group.moduli, f.matrix.tolist(), guards))
    return tasks


def enumerate_quasi_affine(n, guards=None, jobs=1):
    """Every quasi-affine quandle of order n, one descriptor per isomorphism class."""
    guards = resolve_guards(guards)
    guards.check("enumerate_order", n)
    tasks = enumeration_tasks(n, guards)
    logger.info("order %d: %d cells", n, len(tasks))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_run_cell_task, tasks))
    else:
        cells = [_run_cell_task(t) for t in tasks]
    cells.sort(key=lambda c: c.sort_key)
    return Enumeration(n, tuple(cells))


def count_table(n_max, guards=None, jobs=1):
    """The quasi-affine, affine and affine latin counts for orders 1..n_max."""
    rows = {"quasi-affine": [], "affine": [], "latin": []}
    for n in range(1, n_max + 1):
        result = enumerate_quasi_affine(n, guards, jobs)
        rows["quasi-affine"].append(result.total)
        rows["affine"].append(result.affine)
        rows["latin"].append(result.latin)
        logger.info("order %d: %d quasi-affine, %d affine, %d latin", n, result.total, result.affine, result.latin)
    return rows


def _rows_fixing(n, x):
    others = [y for y in range(n) if y != x]
    for perm in itertools.permutations(others):
        row = np.empty(n, dtype=np.int64)
        row[x] = x
        row[others] = perm
        yield row


def _propagate(rows, n):
    """Fill rows forced by L_{a*b} = L_a L_b L_a^-1; False on a contradiction."""
    changed = True
    while changed:
        changed = False
        known = [a for a in range(n) if rows[a] is not None]
        for a in known:
            la = rows[a]
            la_inv = np.argsort(la)
            for b in known:
                c = int(la[b])
                forced = la[rows[b][la_inv]]
                if rows[c] is None:
                    rows[c] = forced
                    changed = True
                elif not np.array_equal(rows[c], forced):
                    return False
            if changed:
                break
    return True


def brute_force_enumerate_quandles(n, guards=None):
    """All quandles of order n up to isomorphism, by backtracking over rows."""
    guards = resolve_guards(guards)
    guards.check("brute_enumerate_order", n)
    found = []

    def search(rows):
        free = [x for x in range(n) if rows[x] is None]
        if not free:
            table = np.stack(rows)
            if not axiom_violations(table):
                found.append(FiniteQuandle(table, check=False))
            return
        x = free[0]
        for row in _rows_fixing(n, x):
            trial = list(rows)
            trial[x] = row
            if _propagate(trial, n):
                search(trial)

    if n >= 1:
        search([None] * n)
    buckets = {}
    classes = []
    for q in found:
        key = tuple(sorted(q.profile(x) for x in range(n)))
        bucket = buckets.setdefault(key, [])
        if any(brute_force_isomorphism(q, r) is not None for r in bucket):
            continue
        bucket.append(q)
        classes.append(q)
    logger.info("order %d: %d labelled quandles, %d up to isomorphism", n, len(found), len(classes))
    return classes
