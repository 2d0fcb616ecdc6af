"""Tests for the benchmark mesh generators."""

import math

import numpy as np
import pytest

from micdam.errors import GeometryError
from micdam.geometry import block3d, generate, graded_fractions, notched, plate_with_hole, strip
from micdam.types import MeshSpec


class TestGradedFractions:
    """Tests for graded point distributions."""

    def test_uniform(self):
        """A ratio of one gives equal segments."""
        np.testing.assert_allclose(graded_fractions(4, 1.0), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_segments_grow_geometrically(self):
        """Consecutive segments grow by the ratio and span [0, 1]."""
        points = graded_fractions(6, 1.2)
        segments = np.diff(points)
        assert points[0] == 0.0 and points[-1] == 1.0
        np.testing.assert_allclose(segments[1:] / segments[:-1], 1.2)

    def test_rejects_empty(self):
        """At least one segment is required."""
        with pytest.raises(GeometryError):
            graded_fractions(0, 1.1)


class TestPlateWithHole:
    """Tests for the quarter plate O-grid."""

    @pytest.mark.parametrize(("level", "elements"), [(0, 128), (1, 512), (2, 2048)])
    def test_counts(self, level, elements):
        """Element count is 128 * 4^level."""
        mesh = plate_with_hole(level)
        side = 8 * 2**level
        assert mesh.n_elements == elements
        assert mesh.n_nodes == (2 * side + 1) * (side + 1)

    def test_node_sets_lie_on_their_boundaries(self):
        """Hole nodes sit on the circle; symmetry and outer sets on their lines."""
        mesh = plate_with_hole(1)
        X = mesh.nodes
        np.testing.assert_allclose(np.hypot(*X[mesh.node_set("hole")].T), 50.0, rtol=1e-12)
        np.testing.assert_array_equal(X[mesh.node_set("bottom"), 1], 0.0)
        np.testing.assert_array_equal(X[mesh.node_set("left"), 0], 0.0)
        assert X[mesh.node_set("top"), 1] == pytest.approx(100.0)
        assert X[mesh.node_set("right"), 0] == pytest.approx(100.0)

    def test_area_is_square_minus_inscribed_polygon(self):
        """The mesh covers the outline minus the polygonal hole exactly."""
        mesh = plate_with_hole(0, thickness=2.0)
        segments = 16
        hole = segments * 0.5 * 50.0**2 * math.sin(math.pi / 2 / segments)
        assert mesh.volume() == pytest.approx(2.0 * (100.0**2 - hole), rel=1e-12)

    def test_grading_refines_towards_hole(self):
        """Radial element size grows away from the hole and the ratio is reported."""
        mesh = plate_with_hole(0)
        radii = np.hypot(*mesh.nodes[:9].T)
        assert np.all(np.diff(np.diff(radii)) > 0.0)
        assert mesh.grading == pytest.approx(1.15)
        assert plate_with_hole(1).grading == pytest.approx(math.sqrt(1.15))

    def test_positive_jacobians(self):
        """Every element is counter-clockwise."""
        assert plate_with_hole(1).jacobians().min() > 0.0

    def test_deterministic(self):
        """Two calls produce identical meshes."""
        a, b = plate_with_hole(1), plate_with_hole(1)
        np.testing.assert_array_equal(a.nodes, b.nodes)
        np.testing.assert_array_equal(a.elements, b.elements)

    def test_hole_larger_than_plate(self):
        """A radius beyond the half-length is infeasible."""
        with pytest.raises(GeometryError):
            plate_with_hole(0, length=40.0, radius=50.0)


class TestNotched:
    """Tests for the asymmetrically notched specimen."""

    @pytest.mark.parametrize(("level", "elements"), [(0, 288), (1, 1152)])
    def test_counts(self, level, elements):
        """Element count is 288 * 4^level."""
        assert notched(level).n_elements == elements

    def test_notch_arcs(self):
        """Notch nodes lie on semicircles around their centres."""
        mesh = notched(1)
        top = mesh.nodes[mesh.node_set("notch_top")]
        bottom = mesh.nodes[mesh.node_set("notch_bottom")]
        np.testing.assert_allclose(np.hypot(top[:, 0] - 40.0, top[:, 1] - 36.0), 5.0, rtol=1e-12)
        np.testing.assert_allclose(np.hypot(bottom[:, 0] - 60.0, bottom[:, 1]), 5.0, rtol=1e-12)
        assert top[:, 1].max() == pytest.approx(36.0)
        assert bottom[:, 1].min() == pytest.approx(0.0)

    def test_area(self):
        """The mesh covers the rectangle minus two polygonal semicircles."""
        mesh = notched(0)
        notches = 2 * 8 * 0.5 * 5.0**2 * math.sin(math.pi / 8)
        assert mesh.volume() == pytest.approx(100.0 * 36.0 - notches, rel=1e-12)

    def test_end_sets(self):
        """Left and right sets span the full height at x = 0 and x = length."""
        mesh = notched(0)
        left, right = mesh.nodes[mesh.node_set("left")], mesh.nodes[mesh.node_set("right")]
        np.testing.assert_array_equal(left[:, 0], 0.0)
        np.testing.assert_array_equal(right[:, 0], 100.0)
        assert left[:, 1].min() == 0.0 and left[:, 1].max() == pytest.approx(36.0)

    @pytest.mark.parametrize(
        "kwargs",
        [{"notch_spacing": 5.0}, {"radius": 20.0}, {"notch_offset": 2.0}, {"level": -1}],
    )
    def test_infeasible(self, kwargs):
        """Overlapping, oversized or misplaced notches are rejected."""
        with pytest.raises(GeometryError):
            notched(**kwargs)


class TestSimpleMeshes:
    """Tests for the rectangular strip and the 3D block."""

    def test_strip(self):
        """A level-1 strip has four elements and the given area."""
        mesh = strip(1, width=2.0, height=3.0, thickness=0.5)
        assert mesh.n_elements == 4
        assert mesh.n_nodes == 9
        assert mesh.volume() == pytest.approx(3.0)
        np.testing.assert_array_equal(mesh.node_set("top"), [2, 5, 8])

    def test_block(self):
        """A level-1 block has eight H8 elements and the box volume."""
        mesh = block3d(1, width=1.0, height=2.0, depth=3.0)
        assert mesh.element_type == "H8"
        assert mesh.n_elements == 8
        assert mesh.n_nodes == 27
        assert mesh.volume() == pytest.approx(6.0)
        np.testing.assert_allclose(mesh.nodes[mesh.node_set("zmax"), 2], 3.0)
        assert mesh.node_set("xmin").size == 9


class TestGenerate:
    """Tests for dispatching a MeshSpec."""

    def test_defaults(self):
        """The default spec is the level-0 plate with hole."""
        assert generate(MeshSpec()).n_elements == 128

    def test_strip_dimensions(self):
        """Strip dimensions come from width and height."""
        mesh = generate(MeshSpec(geometry="strip", width=2.0, height=4.0, thickness=1.5))
        assert mesh.volume() == pytest.approx(12.0)

    def test_notch_radius_override(self):
        """A custom radius reaches the notched generator."""
        mesh = generate(MeshSpec(geometry="notched", radius=4.0))
        top = mesh.nodes[mesh.node_set("notch_top")]
        np.testing.assert_allclose(np.hypot(top[:, 0] - 40.0, top[:, 1] - 36.0), 4.0, rtol=1e-12)

    def test_unknown_geometry(self):
        """Unknown tags raise GeometryError."""
        with pytest.raises(GeometryError, match="unknown geometry"):
            generate(MeshSpec(geometry="disk"))
