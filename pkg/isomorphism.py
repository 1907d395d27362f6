"""
Isomorphism of indecomposable semiregular extensions and of affine quandles.

Ext(A, f, d) and Ext(A', f', d') with k fibres are isomorphic exactly when
there are a bijection pi of the fibres, an isomorphism psi: A -> A' with
psi f = f' psi, and a in A' such that psi(d_i) - d'_pi(i) lies in
a + Im(1 - f') for every i. Both groups are moved to their invariant-factor
form first so psi is searched among automorphisms of one group.
"""
import logging
from dataclasses import dataclass

from abelian import (
    GroupMap,
    automorphism_group,
    coset_key,
    image,
    intersection,
    kernel,
    one_minus,
    restrict,
    subgroup_generated,
    transversal,
)
from constructions import ExtensionDescriptor, extension_table
from core import DecomposableExtension, PreconditionError, QuandleError, resolve_guards
from quandle_core import FiniteQuandle, is_isomorphism

logger = logging.getLogger(__name__)


def is_indecomposable(desc):
    """Im(1-f) together with all d_i - d_j generates A."""
    group = desc.group
    gens = list(desc.im_one_minus_f.generators)
    gens += [group.sub(di, desc.d[0]) for di in desc.d[1:]]
    return subgroup_generated(group, gens).order == group.order


def _conjugate(iso, f, inv):
    return iso.compose(f).compose(inv)


def _intertwiners(auts, f, g):
    """psi in auts with psi f = g psi, the identity first when it qualifies."""
    mods = f.target._mods[:, None]

    def intertwines(psi):
        return not (((psi.matrix @ f.matrix) - (g.matrix @ psi.matrix)) % mods).any()

    one = GroupMap.identity(f.target)
    if intertwines(one):
        yield one
    for psi in auts:
        if psi != one and intertwines(psi):
            yield psi


@dataclass(frozen=True)
class ExtensionIsomorphism:
    """(i, x) -> (pi(i), psi(x) + e_i) between two extensions."""

    source: ExtensionDescriptor
    target: ExtensionDescriptor
    pi: tuple
    psi: GroupMap
    a: tuple
    e: tuple

    def table_map(self):
        src, tgt = self.source, self.target
        mapping = [0] * src.order
        for i in range(src.k):
            for r in range(src.group.order):
                x = src.group.element(r)
                mapping[src.index(i, x)] = tgt.index(self.pi[i], tgt.group.add(self.psi(x), self.e[i]))
        return tuple(mapping)

    def to_dict(self):
        return {
            "pi": list(self.pi),
            "psi": self.psi.matrix.tolist(),
            "a": list(self.a),
            "e": [list(v) for v in self.e],
            "map": list(self.table_map()),
        }


def _require_indecomposable(*descs):
    for desc in descs:
        if not is_indecomposable(desc):
            raise DecomposableExtension(f"{desc} is decomposable")


@dataclass(frozen=True)
class _Canonical:
    group: object
    f: GroupMap
    d: tuple
    to: GroupMap
    back: GroupMap


def _canonical(desc):
    canon, iso, inv = desc.group.canonical_form()
    return _Canonical(canon, _conjugate(iso, desc.f, inv), tuple(iso(x) for x in desc.d), iso, inv)


def ext_isomorphic(desc1, desc2, guards=None):
    """A verified ExtensionIsomorphism, or None."""
    _require_indecomposable(desc1, desc2)
    if desc1.k != desc2.k or desc1.group.order != desc2.group.order:
        return None
    c1, c2 = _canonical(desc1), _canonical(desc2)
    if c1.group != c2.group:
        return None
    group = c1.group
    guards = resolve_guards(guards)
    one_minus_f2 = one_minus(c2.f)
    im2 = image(one_minus_f2)
    labels = coset_key(group, im2)
    target_keys = [int(labels[group.rank_of(x)]) for x in c2.d]
    preimage = {}
    for r, img in enumerate(one_minus_f2.table):
        preimage.setdefault(int(img), group.element(r))
    for psi in _intertwiners(automorphism_group(group, guards), c1.f, c2.f):
        moved = [psi(x) for x in c1.d]
        for a in transversal(group, im2):
            keys = [int(labels[group.rank_of(group.sub(x, a))]) for x in moved]
            if sorted(keys) != sorted(target_keys):
                continue
            free = {}
            for j, key in enumerate(target_keys):
                free.setdefault(key, []).append(j)
            pi = tuple(free[key].pop(0) for key in keys)
            e = []
            for i, j in enumerate(pi):
                delta = group.sub(group.sub(moved[i], c2.d[j]), a)
                e.append(preimage[group.rank_of(delta)])
            witness = _to_original(desc1, desc2, c1, c2, pi, psi, a, e)
            _verify(witness)
            logger.debug("%s and %s are isomorphic with pi=%s", desc1, desc2, pi)
            return witness
    return None


def _to_original(desc1, desc2, c1, c2, pi, psi, a, e):
    psi_orig = c2.back.compose(psi).compose(c1.to)
    return ExtensionIsomorphism(
        desc1, desc2, tuple(pi), psi_orig, c2.back(a), tuple(c2.back(v) for v in e)
    )


def _verify(witness):
    q1 = FiniteQuandle(extension_table(witness.source), check=False)
    q2 = FiniteQuandle(extension_table(witness.target), check=False)
    if not is_isomorphism(q1, q2, witness.table_map()):
        raise QuandleError("extension isomorphism failed verification")


def ext_isomorphic_balanced(desc1, desc2, guards=None):
    """For balanced indecomposable extensions: conjugate f and equal multiplicities suffice."""
    _require_indecomposable(desc1, desc2)
    for desc in (desc1, desc2):
        if not desc.is_balanced:
            raise PreconditionError(f"{desc} is not balanced")
    if desc1.order != desc2.order or desc1.group.order != desc2.group.order:
        return False
    c1, c2 = _canonical(desc1), _canonical(desc2)
    if c1.group != c2.group:
        return False
    if desc1.multiplicity != desc2.multiplicity:
        return False
    auts = automorphism_group(c1.group, resolve_guards(guards))
    return next(_intertwiners(auts, c1.f, c2.f), None) is not None


def _kernel_excess(f):
    phi = one_minus(f)
    ker = kernel(phi)
    return ker.order // intersection(ker, image(phi)).order


def affine_isomorphic(group_a, f, group_b, g, guards=None):
    """
    Aff(A, f) = Aff(B, g) iff f on Im(1-f) and g on Im(1-g) are conjugate by
    an isomorphism and |Ker(1-f) / (Ker & Im)| agrees on both sides.
    """
    if group_a.order != group_b.order:
        return False
    if _kernel_excess(f) != _kernel_excess(g):
        return False
    sa, fa = restrict(f, image(one_minus(f)))
    sb, gb = restrict(g, image(one_minus(g)))
    ca, iso_a, inv_a = sa.canonical_form()
    cb, iso_b, inv_b = sb.canonical_form()
    if ca != cb:
        return False
    fc = _conjugate(iso_a, fa, inv_a)
    gc = _conjugate(iso_b, gb, inv_b)
    auts = automorphism_group(ca, resolve_guards(guards))
    return next(_intertwiners(auts, fc, gc), None) is not None

