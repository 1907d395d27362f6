import itertools
import unittest

from abelian import FiniteAbelianGroup, GroupMap, abelian_groups, automorphism_group, conjugacy_classes
from constructions import ExtensionDescriptor, affine_quandle, extension_table, semiregular_extension
from core import DecomposableExtension, PreconditionError
from enumeration import compositions
from fixtures import ext
from isomorphism import (
    affine_isomorphic,
    ext_isomorphic,
    ext_isomorphic_balanced,
    is_indecomposable,
)
from quandle_core import FiniteQuandle, brute_force_isomorphism, is_isomorphism
from recognition import is_affine


def _indecomposable_descriptors(max_order):
    """Every indecomposable Ext(A, f, d) with d made of least coset representatives, up to |A|*k = max_order."""
    out = []
    for m in range(1, max_order + 1):
        for group in abelian_groups(m):
            for f in conjugacy_classes(automorphism_group(group)):
                for k in range(1, max_order // m + 1):
                    for counts in compositions(k, group.order):
                        d = [group.element(r) for r, c in enumerate(counts) for _ in range(c)]
                        desc = ExtensionDescriptor(group, f, tuple(d))
                        if is_indecomposable(desc):
                            out.append(desc)
    return out


class TestIndecomposable(unittest.TestCase):
    def test_examples(self):
        self.assertFalse(is_indecomposable(ext((3,), 1, [0])))
        self.assertTrue(is_indecomposable(ext((3,), 1, [0, 1])))
        self.assertTrue(is_indecomposable(ext((1,), 1, [0, 0, 0])))
        self.assertTrue(is_indecomposable(ext((5,), 2, [0])))
        self.assertFalse(is_indecomposable(ext((4,), 1, [0, 2])))


class TestExtIsomorphic(unittest.TestCase):
    def test_order_four(self):
        w = ext_isomorphic(ext((2,), 1, [0, 1]), ext((2,), 1, [1, 0]))
        self.assertIsNotNone(w)
        table_map = w.table_map()
        q1 = FiniteQuandle(extension_table(w.source), check=False)
        q2 = FiniteQuandle(extension_table(w.target), check=False)
        self.assertTrue(is_isomorphism(q1, q2, table_map))
        self.assertEqual(set(w.to_dict()), {"pi", "psi", "a", "e", "map"})

    def test_different_orbit_sizes(self):
        self.assertIsNone(ext_isomorphic(ext((2,), 1, [0, 0, 1]), ext((3,), 1, [0, 1])))

    def test_self_gives_identity(self):
        for desc in (
            ext((2, 2), "id", [(0, 0), (1, 0), (0, 1)]),
            ext((2, 2), [[0, 1], [1, 0]], [(0, 0), (1, 0)]),
            ext((3,), 1, [0, 1, 1]),
            ext((5,), 2, [0, 3]),
        ):
            with self.subTest(desc=str(desc)):
                w = ext_isomorphic(desc, desc)
                self.assertEqual(w.table_map(), tuple(range(desc.order)))
                self.assertEqual(w.psi, GroupMap.identity(desc.group))
                self.assertEqual(w.pi, tuple(range(desc.k)))

    def test_decomposable_rejected(self):
        with self.assertRaises(DecomposableExtension):
            ext_isomorphic(ext((3,), 1, [0]), ext((3,), 1, [0]))

    def test_non_cyclic_groups(self):
        a = ext((2, 2), [[0, 1], [1, 0]], [(0, 0), (1, 0)])
        b = ext((4,), 1, [0, 1])
        self.assertIsNone(ext_isomorphic(a, b))

    def test_agrees_with_brute_force(self):
        print("\nTesting extension isomorphism against brute force...")
        descs = _indecomposable_descriptors(10)
        tables = [semiregular_extension(d).quandle for d in descs]
        pairs = 0
        for (i, d1), (j, d2) in itertools.combinations(enumerate(descs), 2):
            if d1.order != d2.order:
                continue
            found = ext_isomorphic(d1, d2) is not None
            self.assertEqual(found, brute_force_isomorphism(tables[i], tables[j]) is not None, f"{d1} vs {d2}")
            pairs += 1
        print(f"{pairs} pairs PASSED")

    def test_affine_descriptors_are_balanced(self):
        for desc in _indecomposable_descriptors(8):
            if is_affine(semiregular_extension(desc).quandle).verdict:
                self.assertTrue(desc.is_balanced, str(desc))


class TestBalanced(unittest.TestCase):
    def test_different_multiplicities(self):
        self.assertFalse(ext_isomorphic_balanced(ext((2,), 1, [0, 1]), ext((2,), 1, [0, 1, 0, 1])))

    def test_unbalanced_rejected(self):
        with self.assertRaises(PreconditionError):
            ext_isomorphic_balanced(ext((2,), 1, [0, 0, 1]), ext((2,), 1, [0, 0, 1]))

    def test_agrees_with_general_test(self):
        descs = [d for d in _indecomposable_descriptors(12) if d.is_balanced]
        self.assertTrue(descs)
        for d1, d2 in itertools.combinations(descs, 2):
            if d1.order != d2.order:
                continue
            self.assertEqual(ext_isomorphic_balanced(d1, d2), ext_isomorphic(d1, d2) is not None, f"{d1} vs {d2}")


class TestAffineIsomorphic(unittest.TestCase):
    def test_examples(self):
        z4 = FiniteAbelianGroup((4,))
        v4 = FiniteAbelianGroup((2, 2))
        swap = GroupMap(v4, v4, [[0, 1], [1, 0]])
        self.assertTrue(affine_isomorphic(z4, GroupMap.scalar(z4, -1), v4, swap))
        self.assertFalse(affine_isomorphic(z4, GroupMap.identity(z4), z4, GroupMap.scalar(z4, -1)))

    def test_agrees_with_brute_force(self):
        print("\nTesting affine isomorphism criterion against brute force...")
        for n in range(1, 10):
            pairs = [(g, f) for g in abelian_groups(n) for f in conjugacy_classes(automorphism_group(g))]
            tables = [affine_quandle(g, f).quandle for g, f in pairs]
            for (i, (g1, f1)), (j, (g2, f2)) in itertools.combinations(enumerate(pairs), 2):
                expected = brute_force_isomorphism(tables[i], tables[j]) is not None
                self.assertEqual(affine_isomorphic(g1, f1, g2, f2), expected, f"{g1} {f1} vs {g2} {f2}")
        print("Affine isomorphism PASSED")


if __name__ == "__main__":
    unittest.main()
