"""Named tables and descriptors shared by the test suites."""
import numpy as np

from abelian import FiniteAbelianGroup, GroupMap
from constructions import ExtensionDescriptor, affine_quandle, semiregular_extension
from quandle_core import FiniteQuandle

_ID = [0, 1, 2, 3, 4, 5, 6, 7]
_A = [1, 0, 2, 3, 5, 4, 7, 6]
_B = [1, 0, 3, 2, 4, 5, 7, 6]
_C = [0, 1, 3, 2, 5, 4, 6, 7]

# Medial with a displacement group that is abelian but fixes points.
EIGHT_TABLE = np.array([_ID, _ID, _A, _A, _B, _B, _C, _C], dtype=np.int64)

# Aff(Z_4, -1) modulo the congruence {0, 2}, {1}, {3}.
THREE_QUOTIENT = np.array([[0, 2, 1], [0, 1, 2], [0, 1, 2]], dtype=np.int64)


def eight_quandle():
    return FiniteQuandle(EIGHT_TABLE)


def three_quotient():
    return FiniteQuandle(THREE_QUOTIENT)


def cyclic(m):
    return FiniteAbelianGroup((m,))


def aff(m, f):
    """Aff(Z_m, f) as a bare FiniteQuandle."""
    return affine_quandle(cyclic(m), f).quandle


def ext(moduli, f, d):
    return ExtensionDescriptor.of(moduli, f, d)


def ext_quandle(moduli, f, d):
    return semiregular_extension(ext(moduli, f, d)).quandle


def identity_map(moduli):
    return GroupMap.identity(FiniteAbelianGroup(moduli))


def relabel(q, perm):
    """The table of q transported along the bijection x -> perm[x]."""
    perm = np.asarray(perm, dtype=np.int64)
    inv = np.argsort(perm)
    table = perm[q.table[inv[:, None], inv[None, :]]]
    return FiniteQuandle(table)
