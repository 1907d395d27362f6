import unittest

import numpy as np

from core import QuandleAxiomError, QuandleError
from enumeration import brute_force_enumerate_quandles
from fixtures import EIGHT_TABLE, aff, eight_quandle, ext_quandle, relabel, three_quotient
from perm_core import Permutation, from_cycles, orbits
from quandle_core import (
    FiniteQuandle,
    axiom_violations,
    brute_force_isomorphism,
    direct_product,
    dis_generators,
    displacement_group,
    is_homomorphism,
    is_isomorphism,
    is_latin,
    is_medial,
    is_medial_oracle,
    left_divide,
    left_division_table,
    left_translation,
    lmlt_generators,
    occurrence_counts,
    orbit_decomposition,
    quotient,
    subquandle,
    validate,
)


class TestValidation(unittest.TestCase):
    def test_valid_tables(self):
        self.assertIsInstance(validate(EIGHT_TABLE), FiniteQuandle)
        self.assertIsInstance(validate(three_quotient().table), FiniteQuandle)
        self.assertEqual(axiom_violations(aff(5, 2).table), [])

    def test_idempotence(self):
        violations = validate([[1, 0], [1, 0]])
        self.assertTrue(any(v.axiom == "idempotence" for v in violations))

    def test_left_division(self):
        violations = validate([[0, 0, 0], [0, 1, 2], [0, 1, 2]])
        self.assertEqual([v.axiom for v in violations], ["left division"])
        self.assertEqual(violations[0].cells, (0,))

    def test_distributivity(self):
        # rows are permutations fixing the diagonal, but L_0 is not an automorphism
        table = [[0, 2, 1, 3], [0, 1, 2, 3], [0, 1, 2, 3], [1, 0, 2, 3]]
        violations = validate(table)
        self.assertTrue(violations)
        self.assertEqual({v.axiom for v in violations}, {"left distributivity"})

    def test_shape_and_range(self):
        self.assertEqual(validate([[0, 1]])[0].axiom, "shape")
        self.assertEqual(validate([[0, 5], [0, 1]])[0].axiom, "range")

    def test_constructor_raises(self):
        with self.assertRaises(QuandleAxiomError) as ctx:
            FiniteQuandle([[1, 0], [1, 0]])
        self.assertTrue(ctx.exception.violations)

    def test_table_is_read_only(self):
        q = aff(3, 2)
        with self.assertRaises(ValueError):
            q.table[0, 0] = 1


class TestTranslations(unittest.TestCase):
    def setUp(self):
        self.q = aff(4, -1)

    def test_left_translation_and_division(self):
        self.assertEqual(left_translation(self.q, 1), Permutation(self.q.table[1]))
        for x in range(4):
            for y in range(4):
                self.assertEqual(self.q.op(x, left_divide(self.q, x, y)), y)
        self.assertEqual(left_division_table(self.q).shape, (4, 4))

    def test_dis_generators(self):
        # Aff(Z_4, -1): x*y = 2x - y, so L_x L_0^-1 is translation by 2x
        gens = dis_generators(self.q, 0)
        self.assertEqual(gens, [Permutation([0, 1, 2, 3]), Permutation([2, 3, 0, 1])])
        self.assertEqual(displacement_group(self.q).order, 2)
        # L_0 = L_2 and L_1 = L_3
        self.assertEqual(len(lmlt_generators(self.q)), 2)

    def test_translation_and_displacement_orbits_agree(self):
        tables = [eight_quandle(), three_quotient(), aff(6, -1), ext_quandle((2,), 1, [0, 0, 1])]
        tables += [q for n in range(1, 6) for q in brute_force_enumerate_quandles(n)]
        for q in tables:
            with self.subTest(table=q.table.tolist()):
                self.assertEqual(orbits(lmlt_generators(q), q.n), orbits(dis_generators(q), q.n))

    def test_eight_table_dis_group(self):
        q = eight_quandle()
        gens = dis_generators(q, 0)
        self.assertEqual(len(gens), 4)
        self.assertIn(from_cycles(8, [0, 1], [4, 5], [6, 7]), gens)
        self.assertEqual(displacement_group(q).order, 4)


class TestStructure(unittest.TestCase):
    def test_medial(self):
        for q in (aff(6, -1), eight_quandle(), three_quotient(), ext_quandle((3,), 1, [0, 1])):
            with self.subTest(q=q):
                self.assertTrue(is_medial(q))
                self.assertTrue(is_medial_oracle(q))

    def test_not_medial(self):
        cyc = FiniteQuandle(_transposition_quandle_s4())
        self.assertFalse(is_medial(cyc))
        self.assertFalse(is_medial_oracle(cyc))

    def test_occurrence_counts(self):
        q = eight_quandle()
        self.assertEqual(occurrence_counts(q, 0).tolist(), [4, 4, 0, 0, 0, 0, 0, 0])

    def test_latin(self):
        self.assertTrue(is_latin(aff(3, 2)))
        self.assertTrue(is_latin(aff(5, 2)))
        self.assertFalse(is_latin(aff(4, -1)))
        self.assertFalse(is_latin(three_quotient()))

    def test_orbit_decomposition(self):
        dec = orbit_decomposition(eight_quandle())
        self.assertEqual(dec.blocks, ((0, 1), (2, 3), (4, 5), (6, 7)))
        self.assertEqual(dec.transversal, (0, 2, 4, 6))
        self.assertEqual(orbit_decomposition(aff(4, -1)).count, 2)

    def test_direct_product(self):
        p = direct_product(aff(3, 2), aff(3, 2))
        self.assertEqual(p.n, 9)
        self.assertEqual(axiom_violations(p.table), [])
        # (1, 2) * (0, 1) = (1*0, 2*1) = (2, 0)
        self.assertEqual(p.op(5, 1), 6)

    def test_subquandle_and_quotient(self):
        q = aff(4, -1)
        even = subquandle(q, [0, 2])
        self.assertTrue(np.array_equal(even.table, [[0, 1], [0, 1]]))
        with self.assertRaises(QuandleError):
            subquandle(aff(5, 2), [0, 1])
        r = quotient(q, [[0, 2], [1], [3]])
        self.assertTrue(np.array_equal(r.table, three_quotient().table))
        with self.assertRaises(QuandleError):
            quotient(q, [[0, 1], [2], [3]])


class TestIsomorphism(unittest.TestCase):
    def test_relabelled_copies(self):
        print("\nTesting brute-force isomorphism on relabelled tables...")
        rng = np.random.default_rng(7)
        for q in (aff(5, 2), eight_quandle(), ext_quandle((2,), 1, [0, 0, 1]), aff(8, 3)):
            perm = rng.permutation(q.n)
            r = relabel(q, perm)
            found = brute_force_isomorphism(q, r)
            self.assertIsNotNone(found)
            self.assertTrue(is_isomorphism(q, r, found))
        print("Brute-force isomorphism PASSED")

    def test_non_isomorphic(self):
        self.assertIsNone(brute_force_isomorphism(aff(5, 2), aff(5, 3)))
        self.assertIsNone(brute_force_isomorphism(aff(4, -1), ext_quandle((1,), 1, [0, 0, 0, 0])))
        self.assertIsNone(brute_force_isomorphism(aff(3, 2), aff(4, -1)))
        # the two non-affine quandles of order 6 have different orbit sizes
        a = ext_quandle((2,), 1, [0, 0, 1])
        b = ext_quandle((3,), 1, [0, 1])
        self.assertIsNone(brute_force_isomorphism(a, b))

    def test_symmetric(self):
        tables = [eight_quandle(), relabel(eight_quandle(), [7, 6, 5, 4, 3, 2, 1, 0])]
        for n in range(1, 5):
            for q in brute_force_enumerate_quandles(n):
                tables += [q, relabel(q, list(reversed(range(n))))]
        for q in tables:
            for r in tables:
                if q.n != r.n:
                    continue
                forward = brute_force_isomorphism(q, r)
                backward = brute_force_isomorphism(r, q)
                self.assertEqual(forward is None, backward is None, (q.table.tolist(), r.table.tolist()))
                if forward is not None:
                    self.assertTrue(is_isomorphism(q, r, forward))
                    self.assertTrue(is_isomorphism(r, q, backward))

    def test_homomorphism(self):
        q = aff(4, -1)
        onto = [0, 1, 0, 2]
        self.assertTrue(is_homomorphism(q, three_quotient(), onto))
        self.assertFalse(is_isomorphism(q, three_quotient(), onto))


def _transposition_quandle_s4():
    """Conjugation on the six transpositions of S_4."""
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    index = {p: i for i, p in enumerate(pairs)}

    def conj(s, t):
        a, b = s
        swap = {a: b, b: a}
        u, v = (swap.get(x, x) for x in t)
        return index[tuple(sorted((u, v)))]

    return [[conj(s, t) for t in pairs] for s in pairs]


if __name__ == "__main__":
    unittest.main()
