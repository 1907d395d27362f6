"""
Quandles built from algebraic data, and the way back.

Forward: affine quandles Aff(A, f), projection quandles, semiregular extensions
Ext(A, f, d) and sums of affine meshes. Backward: the extension representation
of a quandle whose displacement group is abelian and semiregular, and the
embedding of such a quandle into an affine one.

Extension tables are fibre-major: (i, a) is stored at i*|A| + rank(a).
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from abelian import (
    FiniteAbelianGroup,
    GroupMap,
    coset_key,
    image,
    is_automorphism,
    is_multitransversal,
    one_minus,
)
from core import (
    CapExceeded,
    GroupMapError,
    MeshAxiomError,
    NotAdmitted,
    NotQuasiAffine,
    NotRepresentable,
    PreconditionError,
    QuandleError,
    Reason,
)
from perm_core import abstract_abelian_structure, compose, generate_closure, inverse, is_regular_element
from quandle_core import FiniteQuandle, direct_product, dis_generators, is_homomorphism, is_isomorphism, is_medial

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabelledQuandle:
    """A quandle together with the algebraic name of each element."""

    quandle: FiniteQuandle
    labels: tuple

    def index_of(self, label):
        return self.labels.index(label)


def coerce_map(group, f):
    """A GroupMap from an int (scalar), "id", a matrix, or a GroupMap."""
    if isinstance(f, GroupMap):
        return f
    if isinstance(f, str):
        if f.strip() in ("id", "1"):
            return GroupMap.identity(group)
        raise GroupMapError(f"cannot read map {f!r}")
    if isinstance(f, (int, np.integer)):
        return GroupMap.scalar(group, int(f))
    return GroupMap(group, group, f)


def coerce_element(group, a):
    if isinstance(a, (int, np.integer)):
        a = (int(a),)
    return group.normalize(a)


@dataclass(frozen=True)
class ExtensionDescriptor:
    """The data (A, f, d) of the semiregular extension Ext(A, f, d)."""

    group: FiniteAbelianGroup
    f: GroupMap
    d: tuple

    def __post_init__(self):
        if self.f.source != self.group or not is_automorphism(self.f):
            raise GroupMapError(f"f is not an automorphism of {self.group}")
        d = tuple(coerce_element(self.group, a) for a in self.d)
        if not d:
            raise ValueError("an extension needs at least one fibre")
        object.__setattr__(self, "d", d)

    @classmethod
    def of(cls, moduli, f, d):
        group = FiniteAbelianGroup(moduli)
        return cls(group, coerce_map(group, f), tuple(d))

    @property
    def k(self):
        return len(self.d)

    @property
    def order(self):
        return self.k * self.group.order

    @cached_property
    def one_minus_f(self):
        return one_minus(self.f)

    @cached_property
    def im_one_minus_f(self):
        return image(self.one_minus_f)

    def multitransversal(self):
        return is_multitransversal(self.group, self.d, self.im_one_minus_f)

    @property
    def is_balanced(self):
        return self.multitransversal().is_multitransversal

    @property
    def multiplicity(self):
        return self.multitransversal().multiplicity

    def index(self, i, a):
        return i * self.group.order + self.group.rank_of(a)

    def label(self, x):
        i, r = divmod(int(x), self.group.order)
        return i, self.group.element(r)

    def with_d(self, d):
        return ExtensionDescriptor(self.group, self.f, tuple(d))

    def __str__(self):
        return f"Ext({self.group}, {self.f.matrix.tolist()}, {list(self.d)})"


def affine_quandle(group, f):
    """Aff(A, f): a*b = (1-f)(a) + f(b)."""
    f = coerce_map(group, f)
    if f.source != group or not is_automorphism(f):
        raise GroupMapError(f"f is not an automorphism of {group}")
    elems = group.elements
    left = one_minus(f).apply_all(elems)
    right = f.apply_all(elems)
    table = group.ranks(group.reduce(left[:, None, :] + right[None, :, :]))
    labels = tuple(group.element(r) for r in range(group.order))
    return LabelledQuandle(FiniteQuandle(table), labels)


def projection_quandle(k):
    """Proj(k): a*b = b."""
    if k < 1:
        raise ValueError("projection quandle needs k >= 1")
    return FiniteQuandle(np.tile(np.arange(k), (k, 1)), check=False)


def extension_table(desc):
    group = desc.group
    n = group.order
    elems = group.elements
    base = desc.one_minus_f.apply_all(elems)[:, None, :] + desc.f.apply_all(elems)[None, :, :]
    d = np.array(desc.d, dtype=np.int64).reshape(desc.k, group.rank)
    table = np.empty((desc.k * n, desc.k * n), dtype=np.int64)
    for i in range(desc.k):
        for j in range(desc.k):
            block = group.ranks(group.reduce(base + (d[i] - d[j])))
            table[i * n:(i + 1) * n, j * n:(j + 1) * n] = j * n + block
    return table


def semiregular_extension(desc):
    """Ext(A, f, d): (i,a)*(j,b) = (j, (1-f)(a) + f(b) + d_i - d_j)."""
    labels = tuple(desc.label(x) for x in range(desc.order))
    return LabelledQuandle(FiniteQuandle(extension_table(desc)), labels)


@dataclass(frozen=True)
class AffineMesh:
    """Groups A_i, maps phi[i, j]: A_i -> A_j and constants c[i, j] in A_j."""

    groups: tuple
    maps: dict = field(hash=False)
    constants: dict = field(hash=False)

    @property
    def size(self):
        return len(self.groups)

    def validate(self):
        idx = range(self.size)
        for i in idx:
            for j in idx:
                phi = self.maps[i, j]
                if phi.source != self.groups[i] or phi.target != self.groups[j]:
                    raise MeshAxiomError("structure", f"phi[{i},{j}] has the wrong source or target")
                if not self.groups[j].contains(tuple(self.constants[i, j])):
                    raise MeshAxiomError("structure", f"c[{i},{j}] is not an element of A_{j}")
        for i in idx:
            if not is_automorphism(one_minus(self.maps[i, i])):
                raise MeshAxiomError("diagonal automorphism", f"1 - phi[{i},{i}] is not an automorphism")
            if any(self.constants[i, i]):
                raise MeshAxiomError("diagonal constant", f"c[{i},{i}] is not zero")
        for i in idx:
            for k in idx:
                paths = {self.maps[j, k].compose(self.maps[i, j]) for j in idx}
                if len(paths) > 1:
                    raise MeshAxiomError("path independence", f"phi[j,{k}] phi[{i},j] depends on j")
        for i in idx:
            for j in idx:
                for k in idx:
                    ak = self.groups[k]
                    lhs = self.maps[j, k](self.constants[i, j])
                    rhs = self.maps[k, k](ak.sub(self.constants[i, k], self.constants[j, k]))
                    if lhs != rhs:
                        raise MeshAxiomError(
                            "constant compatibility", f"phi[{j},{k}](c[{i},{j}]) = {lhs} but phi[{k},{k}](c[{i},{k}] - c[{j},{k}]) = {rhs}"
                        )
        return self


def mesh_sum(mesh):
    """a*b = c[i,j] + phi[i,j](a) + (1 - phi[j,j])(b) for a in A_i, b in A_j."""
    mesh.validate()
    offsets = np.cumsum([0] + [g.order for g in mesh.groups])
    total = int(offsets[-1])
    table = np.empty((total, total), dtype=np.int64)
    for i, ai in enumerate(mesh.groups):
        for j, aj in enumerate(mesh.groups):
            left = mesh.maps[i, j].apply_all(ai.elements)
            right = one_minus(mesh.maps[j, j]).apply_all(aj.elements)
            c = np.array(mesh.constants[i, j], dtype=np.int64).reshape(aj.rank)
            block = aj.ranks(aj.reduce(left[:, None, :] + right[None, :, :] + c))
            table[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = offsets[j] + block
    labels = tuple((i, g.element(r)) for i, g in enumerate(mesh.groups) for r in range(g.order))
    return LabelledQuandle(FiniteQuandle(table), labels)


def mesh_of_extension(desc):
    """phi[i,j] = 1 - f and c[i,j] = d_i - d_j."""
    g = desc.group
    phi = desc.one_minus_f
    idx = range(desc.k)
    return AffineMesh(
        tuple(g for _ in idx),
        {(i, j): phi for i in idx for j in idx},
        {(i, j): g.sub(desc.d[i], desc.d[j]) for i in idx for j in idx},
    )


@dataclass(frozen=True)
class Representation:
    """An extension over the displacement group mapping onto Q by (i, alpha) -> alpha(t_i)."""

    descriptor: ExtensionDescriptor
    mapping: tuple
    transversal: tuple
    base: int

    @property
    def is_bijective(self):
        return len(set(self.mapping)) == len(self.mapping)

    def inverse_mapping(self):
        if not self.is_bijective:
            raise QuandleError("representation map is not injective")
        inv = [0] * len(self.mapping)
        for x, y in enumerate(self.mapping):
            inv[y] = x
        return tuple(inv)


def _represent(q, e, semiregular):
    if not is_medial(q):
        raise NotRepresentable(Reason.NOT_ABELIAN)
    gens = dis_generators(q, e)
    if semiregular:
        try:
            dis = generate_closure(gens, cap=q.n, admit=is_regular_element, degree=q.n)
        except NotAdmitted as err:
            raise NotRepresentable(Reason.NOT_SEMIREGULAR, witness=err.element)
        except CapExceeded:
            raise NotRepresentable(Reason.NOT_SEMIREGULAR)
    else:
        dis = generate_closure(gens, degree=q.n)
    structure = abstract_abelian_structure(dis)
    group = structure.group
    le = q.translations[e]
    le_inv = inverse(le)
    f_images = [structure.coords(compose(compose(le, structure.permutation(b)), le_inv)) for b in group.basis()]
    f = GroupMap.from_images(group, group, f_images)
    trans = tuple(b[0] for b in q.orbit_blocks)
    d = tuple(structure.coords(compose(q.translations[t], le_inv)) for t in trans)
    desc = ExtensionDescriptor(group, f, d)
    mapping = tuple(
        structure.permutation(group.element(r))(t) for t in trans for r in range(group.order)
    )
    ext = FiniteQuandle(extension_table(desc), check=False)
    if not is_homomorphism(ext, q, mapping) or set(mapping) != set(range(q.n)):
        raise QuandleError("extension representation failed verification")
    logger.debug("represented order-%d quandle over %s with %d fibres", q.n, group, desc.k)
    return Representation(desc, mapping, trans, e)


def extension_representation(q, e=0):
    """
    Q as an indecomposable extension over its displacement group.

    A = Dis Q as an abstract group, f(alpha) = L_e alpha L_e^-1,
    d_i = L_{t_i} L_e^-1 over the least element t_i of each orbit; the
    isomorphism (i, alpha) -> alpha(t_i) is checked before it is returned.
    Raises NotRepresentable when Dis Q is not abelian or not semiregular.
    """
    rep = _represent(q, e, semiregular=True)
    if not is_isomorphism(FiniteQuandle(extension_table(rep.descriptor), check=False), q, rep.mapping):
        raise QuandleError("extension representation is not bijective")
    return rep


def medial_cover(q, e=0):
    """Extension over the full Dis Q mapping homomorphically onto a medial Q."""
    return _represent(q, e, semiregular=False)


def pad_to_multitransversal(desc):
    """Append least coset representatives until every coset of Im(1-f) is hit equally often."""
    im = desc.im_one_minus_f
    check = is_multitransversal(desc.group, desc.d, im)
    if check.is_multitransversal:
        return desc
    target = max(check.counts.values())
    extra = []
    for label, count in sorted(check.counts.items()):
        extra.extend([desc.group.element(label)] * (target - count))
    return desc.with_d(desc.d + tuple(extra))


@dataclass(frozen=True)
class Embedding:
    superquandle: LabelledQuandle
    injection: tuple
    descriptor: ExtensionDescriptor


def quasi_affine_embedding(q):
    """An affine superquandle R of Q with |R| <= |Q|^2, and the injection Q -> R."""
    try:
        rep = extension_representation(q)
    except NotRepresentable as err:
        raise NotQuasiAffine(err.reason, err.witness)
    padded = pad_to_multitransversal(rep.descriptor)
    big = semiregular_extension(padded)
    injection = rep.inverse_mapping()
    if big.quandle.n > q.n ** 2:
        raise QuandleError(f"embedding of order {big.quandle.n} exceeds |Q|^2 = {q.n ** 2}")
    if not is_homomorphism(q, big.quandle, injection):
        raise QuandleError("embedding is not a homomorphism")
    logger.info("embedded order-%d quandle into affine quandle of order %d", q.n, big.quandle.n)
    return Embedding(big, injection, padded)


@dataclass(frozen=True)
class ProductDecomposition:
    factor: ExtensionDescriptor
    multiplicity: int
    mapping: tuple


def product_decomposition_check(desc, subtuple=None):
    """
    Ext(A, f, d) = Ext(A, f, d|J) x Proj(m) for a multitransversal d of multiplicity m.

    ((j, a), u) goes to (fibre(j, u), a + c[j, u]) where fibre(j, u) is the u-th fibre
    whose d lies in the coset of d_j and (1-f)(c[j, u]) = d_j - d_fibre(j, u).
    Returned mapping is indexed by product elements x*m + u.
    """
    group = desc.group
    im = desc.im_one_minus_f
    check = desc.multitransversal()
    if not check.is_multitransversal:
        raise PreconditionError("d is not a multitransversal of A / Im(1-f)")
    m = check.multiplicity
    labels = coset_key(group, im)
    key = [int(labels[group.rank_of(a)]) for a in desc.d]
    if subtuple is None:
        subtuple = [key.index(c) for c in sorted(set(key))]
    subtuple = [int(j) for j in subtuple]
    if sorted(key[j] for j in subtuple) != sorted(set(key)) or len(subtuple) != len(set(key)):
        raise PreconditionError("J does not pick a transversal out of d")
    factor = desc.with_d(tuple(desc.d[j] for j in subtuple))
    preimage = {}
    for r, img in enumerate(desc.one_minus_f.table):
        preimage.setdefault(int(img), group.element(r))
    fibres = {c: [i for i, kk in enumerate(key) if kk == c] for c in set(key)}
    big = semiregular_extension(desc).quandle
    small = semiregular_extension(factor).quandle
    n = group.order
    mapping = [0] * (small.n * m)
    for pos, j in enumerate(subtuple):
        for u, i in enumerate(fibres[key[j]]):
            c = preimage[group.rank_of(group.sub(desc.d[j], desc.d[i]))]
            for r in range(n):
                a = group.element(r)
                mapping[(pos * n + r) * m + u] = desc.index(i, group.add(a, c))
    product = direct_product(small, projection_quandle(m))
    if not is_isomorphism(product, big, mapping):
        raise QuandleError("product decomposition failed verification")
    return ProductDecomposition(factor, m, tuple(mapping))
