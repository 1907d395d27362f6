"""
Decision procedures for affine and quasi-affine quandles.

The two main checks work on the displacement generators D = {L_x L_0^-1}:
is_affine rejects as soon as D is not fixed-point free, not commuting or not
closed, and finally compares the column counts m_{x*0}; is_quasi_affine closes
D under composition with the |Q| cap and a fixed-point test on every new
element. The oracles at the bottom decide the same questions by other means
and exist to cross-check them.
"""
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from abelian import abelian_groups, automorphism_group, conjugacy_classes
from constructions import affine_quandle, extension_representation
from core import CapExceeded, NotAdmitted, NotRepresentable, Reason, resolve_guards
from perm_core import Permutation, fixed_point_count, generate_closure, is_regular_element
from quandle_core import brute_force_isomorphism, dis_generators, is_latin, is_medial, occurrence_counts

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecognitionReport:
    verdict: bool
    reason: Reason
    witness: Any = None

    def __post_init__(self):
        if self.verdict != (self.reason is Reason.OK):
            raise ValueError("a report is positive exactly when its reason is OK")

    def __bool__(self):
        return self.verdict

    def to_dict(self):
        return {"verdict": self.verdict, "reason": self.reason.value, "witness": jsonable(self.witness)}


def jsonable(value):
    if isinstance(value, Permutation):
        return value.images.tolist()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


OK = RecognitionReport(True, Reason.OK)


def _fail(reason, witness=None):
    return RecognitionReport(False, reason, witness)


def _pair_products(stacked, start):
    """
    Yield (i, j, gens[i] after gens[j]) for j >= i + start, with None in
    place of the product when the pair does not commute. Only one row of
    products is held at a time.
    """
    for i in range(len(stacked)):
        after = stacked[i][stacked]
        before = stacked[:, stacked[i]]
        for j in range(i + start, len(stacked)):
            if np.array_equal(after[j], before[j]):
                yield i, j, after[j]
            else:
                yield i, j, None


def is_affine(q):
    """Literal run of the affine recognition algorithm with e = 0."""
    n = q.n
    gens = dis_generators(q, 0)
    for alpha in gens:
        if 0 < fixed_point_count(alpha) < n:
            return _fail(Reason.NOT_SEMIREGULAR, alpha)
    keys = {p.key for p in gens}
    stacked = np.stack([p.images for p in gens])
    for i, j, product in _pair_products(stacked, start=0):
        if product is None:
            return _fail(Reason.NOT_ABELIAN, (gens[i], gens[j]))
        if product.tobytes() not in keys:
            return _fail(Reason.NOT_TINY, (gens[i], gens[j]))
    column = q.table[:, 0]
    m = occurrence_counts(q, 0)
    bad = np.flatnonzero(m[column] != m[q.table[0, 0]])
    if len(bad):
        return _fail(Reason.UNBALANCED, int(column[bad[0]]))
    return OK


def is_quasi_affine(q):
    """Displacement group abelian and semiregular, decided with the |Q| closure cap."""
    n = q.n
    gens = dis_generators(q, 0)
    for alpha in gens:
        if 0 < fixed_point_count(alpha) < n:
            return _fail(Reason.NOT_SEMIREGULAR, alpha)
    stacked = np.stack([p.images for p in gens])
    for i, j, product in _pair_products(stacked, start=1):
        if product is None:
            return _fail(Reason.NOT_ABELIAN, (gens[i], gens[j]))
    try:
        group = generate_closure(gens, cap=n, admit=is_regular_element, degree=n)
    except NotAdmitted as err:
        return _fail(Reason.NOT_SEMIREGULAR, err.element)
    except CapExceeded as err:
        return _fail(Reason.CAP_EXCEEDED, err.size)
    logger.debug("displacement group of order %d on %d points", group.order, n)
    return OK


def is_tiny_dis(q):
    """Dis Q = {L_x L_0^-1 : x in Q}."""
    gens = dis_generators(q, 0)
    try:
        generate_closure(gens, cap=len(gens), degree=q.n)
    except CapExceeded:
        return False
    return True


def balance_check(q, x=0, all_elements=False):
    """m_{x,y} is constant as y runs over the orbit of x (for every x if asked)."""
    points = range(q.n) if all_elements else [x]
    for p in points:
        m = occurrence_counts(q, p)
        orbit = q.orbit_blocks[q.orbit_of[p]]
        if len(np.unique(m[orbit])) != 1:
            return False
    return True


def abelianness_oracle(q, guards=None):
    """
    Is the diagonal a block of the congruence of Q^2 it generates?

    Pairs of Q^2 are closed under left and right translations by every element
    for both * and left division, with union-find transitivity. Only merges
    that join two classes are propagated further.
    """
    guards = resolve_guards(guards)
    guards.check("oracle_order", q.n)
    n = q.n
    size = n * n
    first, second = np.divmod(np.arange(size), n)
    ops = (q.table, q.division_table)
    classes = DisjointSet(range(size))
    diagonal = [x * n + x for x in range(n)]
    pending = [(diagonal[0], d) for d in diagonal[1:]]
    for u, v in pending:
        classes.merge(u, v)
    while pending:
        u, v = pending.pop()
        a, b = divmod(u, n)
        c, d = divmod(v, n)
        for t in ops:
            images = (
                (t[a, first] * n + t[b, second], t[c, first] * n + t[d, second]),
                (t[first, a] * n + t[second, b], t[first, c] * n + t[second, d]),
            )
            for left, right in images:
                for s, r in zip(left.tolist(), right.tolist()):
                    if classes.merge(s, r):
                        pending.append((s, r))
    block = classes.subset(diagonal[0])
    logger.debug("diagonal block of the generated congruence has %d of %d pairs", len(block), size)
    return len(block) == n


@dataclass(frozen=True)
class AffineWitness:
    group: Any
    f: Any
    mapping: tuple


def affine_witness_search(q, guards=None):
    """An (A, f) with Q isomorphic to Aff(A, f) and the isomorphism, or None."""
    guards = resolve_guards(guards)
    for group in abelian_groups(q.n):
        for f in conjugacy_classes(automorphism_group(group, guards)):
            aff = affine_quandle(group, f)
            mapping = brute_force_isomorphism(aff.quandle, q)
            if mapping is not None:
                return AffineWitness(group, f, tuple(mapping))
    return None


def is_affine_via_extension(q):
    """Affine iff the displacement multiset of the extension representation is balanced."""
    try:
        rep = extension_representation(q)
    except NotRepresentable as err:
        return _fail(err.reason, err.witness)
    check = rep.descriptor.multitransversal()
    if not check.is_multitransversal:
        return _fail(Reason.UNBALANCED, check.counts)
    return OK


def medial_report(q):
    return OK if is_medial(q) else _fail(Reason.NOT_MEDIAL)


def latin_report(q):
    if is_latin(q):
        return OK
    cols = np.sort(q.table, axis=0) != np.arange(q.n)[:, None]
    return _fail(Reason.NOT_LATIN, int(np.flatnonzero(cols.any(axis=0))[0]))


def tiny_report(q):
    return OK if is_tiny_dis(q) else _fail(Reason.NOT_TINY)


PROPERTIES = {
    "affine": is_affine,
    "quasi-affine": is_quasi_affine,
    "medial": medial_report,
    "latin": latin_report,
    "tiny": tiny_report,
    "valid": lambda q: OK,
}


def check(q, prop):
    return PROPERTIES[prop](q)
