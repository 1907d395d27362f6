"""
The finite quandle object and the structure read directly off its table.

Elements are 0..n-1 and table[x, y] = x * y. Each row x is the left
translation L_x.
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from core import QuandleAxiomError, QuandleError
from perm_core import (
    Permutation,
    compose,
    fixed_point_count,
    generate_closure,
    inverse,
    is_abelian_generators,
    orbits,
)

logger = logging.getLogger(__name__)

_MAX_REPORTED = 20


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    cells: tuple
    message: str

    def __str__(self):
        return f"{self.axiom} at {self.cells}: {self.message}"


def axiom_violations(table):
    """Every idempotence and left-division failure, and up to a few distributivity failures."""
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        return [AxiomViolation("shape", (), f"table must be square, got shape {t.shape}")]
    n = t.shape[0]
    if n == 0:
        return [AxiomViolation("shape", (), "table is empty")]
    if not np.issubdtype(t.dtype, np.integer):
        return [AxiomViolation("range", (), "entries must be integers")]
    bad = np.argwhere((t < 0) | (t >= n))
    if len(bad):
        return [AxiomViolation("range", tuple(int(v) for v in c), f"entry outside 0..{n - 1}") for c in bad[:_MAX_REPORTED]]
    t = t.astype(np.int64)
    found = []
    for x in np.flatnonzero(t.diagonal() != np.arange(n)):
        found.append(AxiomViolation("idempotence", (int(x), int(x)), f"{x}*{x} = {t[x, x]}"))
    sorted_rows = np.sort(t, axis=1)
    for x in np.flatnonzero((sorted_rows != np.arange(n)).any(axis=1)):
        found.append(AxiomViolation("left division", (int(x),), f"row {x} is not a permutation"))
    if found:
        return found
    for x in range(n):
        row = t[x]
        lhs = row[t]
        rhs = t[row[:, None], row[None, :]]
        for y, z in np.argwhere(lhs != rhs)[: _MAX_REPORTED - len(found)]:
            found.append(AxiomViolation(
                "left distributivity", (x, int(y), int(z)),
                f"{x}*({y}*{z}) = {lhs[y, z]} but ({x}*{y})*({x}*{z}) = {rhs[y, z]}",
            ))
        if len(found) >= _MAX_REPORTED:
            break
    return found


class FiniteQuandle:
    """An immutable multiplication table satisfying the quandle axioms."""

    def __init__(self, table, check=True):
        arr = np.array(table, dtype=np.int64)
        if check:
            violations = axiom_violations(arr)
            if violations:
                raise QuandleAxiomError(violations)
        arr.flags.writeable = False
        self.table = arr

    @property
    def n(self):
        return self.table.shape[0]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, FiniteQuandle) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return f"FiniteQuandle(n={self.n})"

    def op(self, x, y):
        return int(self.table[x, y])

    @cached_property
    def division_table(self):
        div = np.argsort(self.table, axis=1)
        div.flags.writeable = False
        return div

    @cached_property
    def translations(self):
        return tuple(Permutation(row) for row in self.table)

    @cached_property
    def orbit_blocks(self):
        return orbits(_unique(self.translations), self.n)

    @cached_property
    def orbit_of(self):
        label = np.empty(self.n, dtype=np.int64)
        for i, block in enumerate(self.orbit_blocks):
            label[block] = i
        return label

    def profile(self, x):
        """Isomorphism-invariant data attached to x, used to prune searches."""
        return self._profiles[x]

    @cached_property
    def _profiles(self):
        sizes = [len(b) for b in self.orbit_blocks]
        out = []
        for x in range(self.n):
            counts = np.bincount(self.table[:, x], minlength=self.n)
            out.append((
                sizes[self.orbit_of[x]],
                tuple(sorted(int(c) for c in counts)),
                fixed_point_count(self.translations[x]),
            ))
        return tuple(out)


def validate(table):
    """A FiniteQuandle, or the list of axiom violations."""
    violations = axiom_violations(table)
    if violations:
        return violations
    return FiniteQuandle(table, check=False)


def left_translation(q, x):
    return q.translations[x]


def left_divide(q, x, y):
    return int(q.division_table[x, y])


def left_division_table(q):
    return q.division_table


def _unique(perms):
    seen = {}
    for p in perms:
        seen.setdefault(p.key, p)
    return list(seen.values())


def lmlt_generators(q):
    return _unique(q.translations)


def dis_generators(q, e=0):
    """{L_x L_e^-1 : x in Q}, duplicates removed, in order of x."""
    le_inv = inverse(q.translations[e])
    return _unique(compose(lx, le_inv) for lx in q.translations)


def displacement_group(q, cap=None):
    return generate_closure(dis_generators(q), cap=cap, degree=q.n)


def is_medial(q):
    return is_abelian_generators(dis_generators(q))


def is_medial_oracle(q):
    """(x*y)*(u*v) = (x*u)*(y*v) over all quadruples."""
    t = q.table
    lhs = t[t[:, :, None, None], t[None, None, :, :]]
    rhs = t[t[:, None, :, None], t[None, :, None, :]]
    return bool((lhs == rhs).all())


def occurrence_counts(q, x):
    """m[y] = |{z : z*x = y}|."""
    return np.bincount(q.table[:, x], minlength=q.n)


def is_latin(q):
    return bool((np.sort(q.table, axis=0) == np.arange(q.n)[:, None]).all())


def direct_product(q, r):
    """Q x R with (a, b) stored at index a*|R| + b."""
    m = r.n
    t = q.table[:, None, :, None] * m + r.table[None, :, None, :]
    return FiniteQuandle(t.reshape(q.n * m, q.n * m), check=False)


@dataclass(frozen=True)
class OrbitDecomposition:
    blocks: tuple
    transversal: tuple

    @property
    def count(self):
        return len(self.blocks)


def orbit_decomposition(q):
    blocks = tuple(tuple(b) for b in q.orbit_blocks)
    return OrbitDecomposition(blocks, tuple(b[0] for b in blocks))


def subquandle(q, elements):
    """The subquandle on a ∗-closed subset, relabelled in increasing order."""
    elems = sorted(set(int(x) for x in elements))
    sub = q.table[np.ix_(elems, elems)]
    position = np.full(q.n, -1, dtype=np.int64)
    position[elems] = np.arange(len(elems))
    relabelled = position[sub]
    if (relabelled < 0).any():
        raise QuandleError(f"subset {elems} is not closed under the operation")
    return FiniteQuandle(relabelled, check=False)


def quotient(q, blocks):
    """Q / ~ for the partition given by blocks; blocks numbered by least element."""
    blocks = sorted((sorted(int(x) for x in b) for b in blocks), key=lambda b: b[0])
    label = np.full(q.n, -1, dtype=np.int64)
    for i, b in enumerate(blocks):
        label[b] = i
    if (label < 0).any() or sum(len(b) for b in blocks) != q.n:
        raise QuandleError("blocks do not partition the quandle")
    k = len(blocks)
    out = np.full((k, k), -1, dtype=np.int64)
    image = label[q.table]
    for i, bi in enumerate(blocks):
        for j, bj in enumerate(blocks):
            cell = np.unique(image[np.ix_(bi, bj)])
            if len(cell) != 1:
                raise QuandleError(f"partition is not a congruence (blocks {i}, {j})")
            out[i, j] = cell[0]
    return FiniteQuandle(out)


def is_homomorphism(q, r, mapping):
    mapping = np.asarray(mapping, dtype=np.int64)
    return bool((r.table[mapping[:, None], mapping[None, :]] == mapping[q.table]).all())


def is_isomorphism(q, r, mapping):
    mapping = np.asarray(mapping, dtype=np.int64)
    return q.n == r.n and len(np.unique(mapping)) == q.n and is_homomorphism(q, r, mapping)


def brute_force_isomorphism(q, r):
    """
    A table-preserving bijection Q -> R as a list, or None.

    Backtracks over images element by element. Each assignment is propagated
    through phi(x*y) = phi(x)*phi(y), and images must carry the same profile
    (orbit size, sorted column counts, fixed points of the translation).
    """
    if q.n != r.n:
        return None
    n = q.n
    pq = [q.profile(x) for x in range(n)]
    pr = [r.profile(y) for y in range(n)]
    if sorted(pq) != sorted(pr):
        return None
    qt, rt = q.table, r.table

    def propagate(phi, used, assigned, queue):
        while queue:
            x = queue.pop()
            for a in list(assigned):
                for u, v in ((a, x), (x, a)):
                    w = int(qt[u, v])
                    img = int(rt[phi[u], phi[v]])
                    if phi[w] < 0:
                        if used[img] or pr[img] != pq[w]:
                            return False
                        phi[w] = img
                        used[img] = True
                        assigned.append(w)
                        queue.append(w)
                    elif phi[w] != img:
                        return False
        return True

    def search(phi, used, assigned):
        free = np.flatnonzero(phi < 0)
        if not len(free):
            return [int(v) for v in phi]
        x = int(free[0])
        for y in range(n):
            if used[y] or pr[y] != pq[x]:
                continue
            phi2, used2, assigned2 = phi.copy(), used.copy(), assigned + [x]
            phi2[x] = y
            used2[y] = True
            if propagate(phi2, used2, assigned2, [x]):
                found = search(phi2, used2, assigned2)
                if found is not None:
                    return found
        return None

    result = search(np.full(n, -1, dtype=np.int64), np.zeros(n, dtype=bool), [])
    if result is not None and not is_isomorphism(q, r, result):
        raise QuandleError("isomorphism search produced an invalid map")
    return result
