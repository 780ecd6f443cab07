import tempfile
import unittest
from pathlib import Path

from src.cohomology import cohomology
from src.svg_figure import polygonal_line, render_report, save_svg
from src.toric_surface import blow_up, from_a_sequence, invariant_divisor, minimal_model_basis


class TestPolygonalLine(unittest.TestCase):
    def test_closes_up(self):
        X = from_a_sequence((1, 1, 1))
        H = invariant_divisor(X, 0)
        pts = polygonal_line(X, 2 * H)
        self.assertEqual(len(pts), X.n + 1)
        self.assertEqual(pts[0], pts[-1])

    def test_vertices_are_sections_of_ample_class(self):
        X = from_a_sequence((1, 1, 1))
        H = invariant_divisor(X, 0)
        sections = set(cohomology(X, H).sections)
        for p in polygonal_line(X, H):
            self.assertIn(p, sections)


class TestRender(unittest.TestCase):
    def test_layers(self):
        X = blow_up(from_a_sequence((1, 1, 1)), 0)
        b = minimal_model_basis(X, list(reversed(X.history.steps)))
        svg = render_report(X, b.parse("2H-R1"), b)
        self.assertTrue(svg.startswith("<?xml"))
        self.assertIn("<svg", svg)
        for group in ("hyperplanes", "triangles", "sections", "interior", "polygonal-line"):
            self.assertIn(f'id="{group}"', svg)
        self.assertTrue(svg.rstrip().endswith("</svg>"))

    def test_save(self):
        X = from_a_sequence((1, 1, 1))
        svg = render_report(X, invariant_divisor(X, 0))
        with tempfile.TemporaryDirectory() as tmp:
            out = save_svg(svg, Path(tmp) / "a" / "b.svg")
            self.assertEqual(out.read_text(encoding="utf-8"), svg)


if __name__ == "__main__":
    unittest.main()
