import contextlib
import io
import json
import tempfile
import unittest
from pathlib import Path

from src.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, run, surface_from_name, UsageError

COUNTEREXAMPLE = "-2,-2,-1,-3,-2,0,1"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(list(argv))
    return code, out.getvalue(), err.getvalue()


class TestSurfaceCommands(unittest.TestCase):
    def test_new_with_negative_sequence(self):
        code, out, _ = call("surface", "new", "--a", COUNTEREXAMPLE)
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual(doc["a"], [-2, -2, -1, -3, -2, 0, 1])
        self.assertEqual(doc["n"], 7)
        self.assertEqual(doc["anticanonical"], "not-nef")

    def test_two_step_verdict(self):
        code, out, _ = call("surface", "check-two-step", "--a", COUNTEREXAMPLE)
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertFalse(doc["two_step"])
        self.assertIsNone(doc["witness"])

    def test_named_surfaces(self):
        self.assertEqual(surface_from_name("P2"), [1, 1, 1])
        self.assertEqual(surface_from_name("f3"), [0, 3, 0, -3])
        with self.assertRaises(UsageError):
            surface_from_name("f")

    def test_nef_check(self):
        code, out, _ = call("surface", "nef", "--surface", "6d")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(out)["nef"])

    def test_enumerate(self):
        code, out, _ = call("surface", "enumerate", "--n", "4", "--a_min", "-2")
        self.assertEqual(code, EXIT_OK)
        self.assertGreater(json.loads(out)["count"], 0)


class TestErrors(unittest.TestCase):
    def test_schema_violation_is_usage_error(self):
        code, _, err = call("surface", "new", "--a", "1,1")
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("schema", err)

    def test_missing_surface_is_usage_error(self):
        code, _, _ = call("surface", "new")
        self.assertEqual(code, EXIT_USAGE)

    def test_invalid_sequence_is_domain_error(self):
        code, _, err = call("surface", "new", "--a", "1,1,2")
        self.assertEqual(code, EXIT_DOMAIN)
        self.assertIn("error", err)

    def test_missing_input_file(self):
        code, _, _ = call("surface", "new", "--input", "does/not/exist.json")
        self.assertEqual(code, EXIT_USAGE)

    def test_unknown_property_in_input(self):
        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "doc.json"
            p.write_text(json.dumps({"a": [1, 1, 1], "colour": "red"}), encoding="utf-8")
            code, _, _ = call("surface", "new", "--input", str(p))
        self.assertEqual(code, EXIT_USAGE)

    def test_unknown_table(self):
        code, _, _ = call("tables", "reproduce", "no-such-table")
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_divisor(self):
        code, _, _ = call("divisor", "cohomology", "--surface", "p2")
        self.assertEqual(code, EXIT_USAGE)


class TestDivisorAndSystemCommands(unittest.TestCase):
    def test_cohomology_of_line(self):
        code, out, _ = call("divisor", "cohomology", "--surface", "p2", "--d", "1,1,1")
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual((doc["h0"], doc["h1"], doc["h2"]), (3, 0, 0))
        self.assertEqual(doc["divisor"], "H")

    def test_cohomology_of_cubics(self):
        code, out, _ = call("divisor", "cohomology", "--surface", "p2", "--coeffs", "3H")
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual((doc["h0"], doc["h1"], doc["h2"]), (10, 0, 0))
        self.assertEqual(len(doc["sections"]), 10)

    def test_check_slo_from_input_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "doc.json"
            p.write_text(json.dumps({"a": [1, 1, 1], "divisor": "H"}), encoding="utf-8")
            code, out, _ = call("divisor", "check-slo", "--input", str(p))
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertTrue(doc["strongly_left_orthogonal"])
        self.assertTrue(doc["augmentation_corner"])

    def test_system_check(self):
        code, out, _ = call("system", "check", "--surface", "p2", "--system", "H;H;H")
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertTrue(doc["cyclic_strongly_exceptional"])

    def test_system_validate_reports_violations(self):
        code, out, _ = call("system", "validate", "--surface", "p2", "--system", "H;H;2H")
        self.assertEqual(code, EXIT_OK)
        self.assertFalse(json.loads(out)["ok"])

    def test_gale_dual_of_plane_system(self):
        code, out, _ = call("system", "gale-dual", "--surface", "p2", "--system", "H;H;H")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["canonical_form"], [1, 1, 1])


class TestGeneratorsAndSearch(unittest.TestCase):
    def test_generate_is_reproducible(self):
        argv = ("augment", "generate", "--seed", "3", "--count", "2", "--max_rank", "5")
        first = call(*argv)
        second = call(*argv)
        self.assertEqual(first[0], EXIT_OK)
        self.assertEqual(first[1], second[1])
        doc = json.loads(first[1])
        self.assertEqual(doc["seed"], 3)
        self.assertEqual(len(doc["surfaces"]), 2)

    def test_plane_search(self):
        code, out, _ = call("search", "strong", "--surface", "p2", "--jobs", "1")
        self.assertEqual(code, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual(doc["count"], 1)
        self.assertEqual(doc["hits"], [["H", "H", "H"]])

    def test_search_takes_no_parameter_range(self):
        code, _, _ = call("search", "strong", "--surface", "p2", "--s_min", "0")
        self.assertEqual(code, EXIT_USAGE)

    def test_standard_systems(self):
        code, out, _ = call("augment", "standard", "--surface", "f1", "--s_min", "-1", "--s_max", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(json.loads(out)["systems"]), 3)


class TestFigure(unittest.TestCase):
    def test_svg_written(self):
        with tempfile.TemporaryDirectory() as tmp:
            out_path = Path(tmp) / "fig" / "line.svg"
            code, out, _ = call("figure", "svg", "--surface", "p2", "--d", "1,1,1", "--out", str(out_path))
            self.assertEqual(code, EXIT_OK)
            self.assertTrue(out_path.exists())
            self.assertIn("Saved:", out)
            self.assertIn("<svg", out_path.read_text(encoding="utf-8"))


if __name__ == "__main__":
    unittest.main()
