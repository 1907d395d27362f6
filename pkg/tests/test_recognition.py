import time
import tracemalloc
import unittest

import numpy as np

from constructions import affine_quandle, projection_quandle, semiregular_extension
from core import GuardExceeded, Guards, Reason
from enumeration import brute_force_enumerate_quandles, enumerate_quasi_affine
from fixtures import aff, eight_quandle, ext_quandle, three_quotient
from quandle_core import FiniteQuandle, is_isomorphism
from recognition import (
    PROPERTIES,
    RecognitionReport,
    abelianness_oracle,
    affine_witness_search,
    balance_check,
    check,
    is_affine,
    is_affine_via_extension,
    is_quasi_affine,
    is_tiny_dis,
)


def _corpus(max_order):
    """One table per quasi-affine class of each order up to max_order."""
    out = []
    for n in range(1, max_order + 1):
        for cls in enumerate_quasi_affine(n, Guards()).classes():
            out.append((cls, semiregular_extension(cls.descriptor).quandle))
    return out


class TestNamedExamples(unittest.TestCase):
    def test_affine_z6(self):
        report = is_affine(aff(6, -1))
        self.assertTrue(report.verdict)
        self.assertIs(report.reason, Reason.OK)

    def test_unbalanced_extension(self):
        q = ext_quandle((2,), 1, [0, 0, 1])
        self.assertEqual(is_affine(q).reason, Reason.UNBALANCED)
        self.assertTrue(is_quasi_affine(q).verdict)
        self.assertTrue(is_tiny_dis(q))
        self.assertFalse(balance_check(q))

    def test_quotient_of_aff_z4(self):
        q = three_quotient()
        self.assertEqual(is_affine(q).reason, Reason.NOT_SEMIREGULAR)
        self.assertEqual(is_quasi_affine(q).reason, Reason.NOT_SEMIREGULAR)
        self.assertTrue(is_tiny_dis(q))

    def test_dis_not_tiny(self):
        q = ext_quandle((3,), 1, [0, 1])
        self.assertTrue(is_quasi_affine(q).verdict)
        self.assertFalse(is_tiny_dis(q))
        self.assertEqual(is_affine(q).reason, Reason.NOT_TINY)

    def test_eight_table(self):
        q = eight_quandle()
        report = is_quasi_affine(q)
        self.assertFalse(report.verdict)
        self.assertEqual(report.reason, Reason.NOT_SEMIREGULAR)
        self.assertTrue(balance_check(q))
        self.assertFalse(abelianness_oracle(q))

    def test_projection(self):
        for k in (1, 2, 5):
            self.assertTrue(is_quasi_affine(projection_quandle(k)).verdict)
            self.assertTrue(is_affine(projection_quandle(k)).verdict)
        for k in range(1, 9):
            self.assertTrue(abelianness_oracle(projection_quandle(k)))


class TestReports(unittest.TestCase):
    def test_verdict_matches_reason(self):
        with self.assertRaises(ValueError):
            RecognitionReport(True, Reason.NOT_TINY)
        with self.assertRaises(ValueError):
            RecognitionReport(False, Reason.OK)

    def test_to_dict(self):
        d = is_affine(three_quotient()).to_dict()
        self.assertEqual(d["verdict"], False)
        self.assertEqual(d["reason"], "NotSemiregular")
        self.assertEqual(d["witness"], [0, 2, 1])

    def test_dispatch(self):
        self.assertEqual(set(PROPERTIES), {"affine", "quasi-affine", "medial", "latin", "tiny", "valid"})
        self.assertTrue(check(aff(5, 2), "latin").verdict)
        self.assertEqual(check(aff(4, -1), "latin").reason, Reason.NOT_LATIN)
        self.assertTrue(check(eight_quandle(), "medial").verdict)
        self.assertEqual(check(ext_quandle((3,), 1, [0, 1]), "tiny").reason, Reason.NOT_TINY)
        self.assertTrue(check(eight_quandle(), "valid").verdict)


class TestBalance(unittest.TestCase):
    def test_affine_quandles_balanced(self):
        for m, f in ((4, -1), (6, -1), (8, 3), (9, 2)):
            q = aff(m, f)
            self.assertTrue(balance_check(q))
            self.assertTrue(balance_check(q, all_elements=True))

    def test_single_point_agrees_with_all_points(self):
        for _, q in _corpus(6):
            self.assertEqual(balance_check(q), balance_check(q, all_elements=True))


class TestOracles(unittest.TestCase):
    def test_witness_search(self):
        q = ext_quandle((2,), 1, [0, 1])
        w = affine_witness_search(q)
        self.assertIsNotNone(w)
        self.assertEqual(w.group.order, 4)
        built = affine_quandle(w.group, w.f).quandle
        self.assertTrue(is_isomorphism(built, q, w.mapping))
        self.assertIsNone(affine_witness_search(ext_quandle((2,), 1, [0, 0, 1])))
        w = affine_witness_search(projection_quandle(3))
        self.assertTrue(w.f.is_bijective())

    def test_affine_agrees_with_witness_search(self):
        print("\nTesting is_affine against the definition-based search...")
        corpus = _corpus(12)
        for cls, q in corpus:
            expected = affine_witness_search(q) is not None
            self.assertEqual(is_affine(q).verdict, expected, str(cls.descriptor))
            self.assertEqual(cls.affine, expected)
            self.assertEqual(is_affine_via_extension(q).verdict, expected)
        print(f"{len(corpus)} quandles PASSED")

    def test_quasi_affine_agrees_with_congruence_oracle(self):
        print("\nTesting is_quasi_affine against the congruence oracle...")
        tables = [q for n in range(1, 6) for q in brute_force_enumerate_quandles(n)]
        tables += [q for _, q in _corpus(6)]
        tables += [three_quotient(), eight_quandle()]
        for q in tables:
            self.assertEqual(is_quasi_affine(q).verdict, abelianness_oracle(q), q.table.tolist())
        print(f"{len(tables)} quandles PASSED")

    def test_oracle_guard(self):
        with self.assertRaises(GuardExceeded):
            abelianness_oracle(aff(9, 2), Guards(oracle_order=8))

    def test_not_representable_via_extension(self):
        self.assertEqual(is_affine_via_extension(eight_quandle()).reason, Reason.NOT_SEMIREGULAR)


class TestImplications(unittest.TestCase):
    def test_affine_implies_quasi_affine_and_tiny(self):
        for _, q in _corpus(8):
            if is_affine(q).verdict:
                self.assertTrue(is_quasi_affine(q).verdict)
                self.assertTrue(is_tiny_dis(q))


class TestScaling(unittest.TestCase):
    def test_projection_doubling(self):
        print("\nTesting quasi-affine recognition runtime on projection quandles...")
        timings = []
        for n in (64, 128, 256):
            q = FiniteQuandle(np.tile(np.arange(n), (n, 1)), check=False)
            best = float("inf")
            for _ in range(3):
                fresh = FiniteQuandle(q.table, check=False)
                start = time.perf_counter()
                self.assertTrue(is_quasi_affine(fresh).verdict)
                best = min(best, time.perf_counter() - start)
            timings.append(best)
        for small, big in zip(timings, timings[1:]):
            self.assertLessEqual(big, 16 * small + 0.05)
        print("Timings: " + ", ".join(f"{t * 1000:.1f}ms" for t in timings))

    def test_commutation_memory_stays_quadratic(self):
        # |D| = n for a latin quandle
        n = 331
        q = aff(n, 2)
        tracemalloc.start()
        try:
            self.assertTrue(is_quasi_affine(q).verdict)
            self.assertTrue(is_affine(q).verdict)
            _, peak = tracemalloc.get_traced_memory()
        finally:
            tracemalloc.stop()
        self.assertLess(peak, n ** 3 * 8 // 4)


if __name__ == "__main__":
    unittest.main()
