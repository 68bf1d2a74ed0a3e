"""Turning angles, radial projection, and the projection bound.

Oracles: regular polygons (TC exactly 2*pi), hand-computed subtended
angles for the unit square, and the spherical-circle limit for a planar
circle seen from an off-plane apex.
"""

import math

import numpy as np
import pytest

from surfcert import (
    CornerFlag,
    InputInconsistentError,
    InvalidParameterError,
    PolylineCurve,
    ProjectionSingularError,
    best_fit_plane_deviation,
    build_cone,
    cone_density,
    curve_length,
    projection_bound_report,
    radial_projection_length,
    total_curvature,
    turning_angles,
)


def regular_polygon(k: int, radius: float = 1.0, z: float = 0.0) -> PolylineCurve:
    ang = 2.0 * math.pi * np.arange(k) / k
    pts = np.stack([radius * np.cos(ang), radius * np.sin(ang), np.full(k, z)], axis=1)
    return PolylineCurve(pts)


def unit_square() -> PolylineCurve:
    return PolylineCurve(np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float))


class TestTotalCurvature:
    def test_square_turns_by_two_pi(self):
        sq = unit_square()
        assert turning_angles(sq) == pytest.approx([math.pi / 2] * 4)
        assert total_curvature(sq) == pytest.approx(2.0 * math.pi, abs=1e-12)

    def test_regular_polygon_turns_by_two_pi(self):
        for k in (3, 7, 128):
            assert total_curvature(regular_polygon(k)) == pytest.approx(
                2.0 * math.pi, abs=1e-9
            )

    def test_reflex_polygon_exceeds_two_pi(self):
        # L-shape: one reflex corner adds 2*(pi/2) beyond the convex total
        pts = np.array(
            [[0, 0, 0], [2, 0, 0], [2, 1, 0], [1, 1, 0], [1, 2, 0], [0, 2, 0]],
            dtype=float,
        )
        tc = total_curvature(PolylineCurve(pts))
        assert tc == pytest.approx(3.0 * math.pi, abs=1e-12)

    def test_nonplanar_polygon_satisfies_fenchel(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            k = int(rng.integers(4, 12))
            ang = np.sort(rng.uniform(0, 2 * math.pi, size=k))
            if np.min(np.diff(ang, append=ang[0] + 2 * math.pi)) < 1e-3:
                continue
            r = rng.uniform(0.5, 1.5, size=k)
            z = rng.uniform(-0.4, 0.4, size=k)
            pts = np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)
            assert total_curvature(PolylineCurve(pts)) >= 2.0 * math.pi - 1e-9

    def test_open_curve_rejects_turning_angles(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [2, 1, 0]], dtype=float)
        open_curve = PolylineCurve(pts, closed=False)
        with pytest.raises(InvalidParameterError):
            turning_angles(open_curve)

    def test_length(self):
        assert curve_length(unit_square()) == pytest.approx(4.0, abs=1e-15)


class TestRadialProjection:
    def test_planar_curve_from_inside_point_covers_the_sphere_equator(self):
        # any simple planar polygon seen from an interior point subtends 2*pi
        for k in (3, 5, 64):
            c = regular_polygon(k)
            got = radial_projection_length(c, (0.0, 0.0, 0.0))
            assert got == pytest.approx(2.0 * math.pi, abs=1e-12)
            assert cone_density(c, (0.0, 0.0, 0.0)) == pytest.approx(1.0, abs=1e-12)

    def test_off_center_interior_point_still_two_pi(self):
        c = regular_polygon(16)
        got = radial_projection_length(c, (0.3, -0.2, 0.0))
        assert got == pytest.approx(2.0 * math.pi, abs=1e-12)

    def test_exterior_point_in_plane_wraps_zero(self):
        # from outside in the plane the polygon subtends a back-and-forth arc
        got = radial_projection_length(regular_polygon(8), (5.0, 0.0, 0.0))
        tc = total_curvature(regular_polygon(8))
        assert got < tc
        assert got > 0.0

    def test_apex_above_center_matches_spherical_circle(self):
        # circle of radius rho seen from height h projects onto a spherical
        # circle of length 2*pi*sin(beta), beta = atan(rho/h)
        rho, h, k = 1.0, 2.0, 512
        c = regular_polygon(k, radius=rho)
        got = radial_projection_length(c, (0.0, 0.0, h))
        want = 2.0 * math.pi * math.sin(math.atan2(rho, h))
        assert got == pytest.approx(want, rel=1e-4)

    def test_vertex_excision_square_corner(self):
        # from the corner (0,0): incident sides contribute nothing, each far
        # side subtends pi/4
        got = radial_projection_length(unit_square(), (0.0, 0.0, 0.0))
        assert got == pytest.approx(math.pi / 2.0, abs=1e-12)

    def test_point_on_edge_interior_rejected(self):
        with pytest.raises(ProjectionSingularError):
            radial_projection_length(unit_square(), (0.5, 0.0, 0.0))

    def test_open_curve_rejected(self):
        c = PolylineCurve(np.array([[0, 0, 0], [1, 0, 0]], dtype=float), closed=False)
        with pytest.raises(InvalidParameterError):
            radial_projection_length(c, (0.0, 0.5, 0.0))


class TestProjectionBound:
    def test_interior_mode_bound_is_total_curvature(self):
        c = regular_polygon(12)
        rep = projection_bound_report(c, (0.1, 0.2, 0.05))
        assert rep.mode == "interior"
        assert rep.bound == pytest.approx(rep.tc)
        assert rep.slack >= -rep.tolerance
        assert rep.ok

    def test_boundary_mode_square_corner_is_tight(self):
        # bound = TC - pi - theta = 2*pi - pi - pi/2 = pi/2, met with equality
        rep = projection_bound_report(unit_square(), (0.0, 0.0, 0.0))
        assert rep.mode == "boundary"
        assert rep.theta == pytest.approx(math.pi / 2.0)
        assert rep.bound == pytest.approx(math.pi / 2.0)
        assert rep.projection_length == pytest.approx(math.pi / 2.0, abs=1e-12)
        assert abs(rep.slack) <= 1e-9
        assert rep.ok

    def test_sampled_curve_uses_flagged_theta(self):
        # same square, but flagged as a sampled curve with one true corner
        flags = (CornerFlag(index=0, theta=math.pi / 2.0),)
        c = PolylineCurve(unit_square().vertices, corner_flags=flags)
        rep = projection_bound_report(c, (0.0, 0.0, 0.0))
        assert rep.theta == pytest.approx(math.pi / 2.0)

    def test_sampled_curve_unflagged_vertex_counts_as_smooth(self):
        c = PolylineCurve(unit_square().vertices, corner_flags=())
        rep = projection_bound_report(c, (1.0, 0.0, 0.0))
        assert rep.mode == "boundary"
        assert rep.theta == 0.0
        assert rep.bound == pytest.approx(math.pi)

    def test_to_dict_round_trip_fields(self):
        rep = projection_bound_report(regular_polygon(6), (0.0, 0.0, 0.0))
        d = rep.to_dict()
        assert d["mode"] == "interior"
        assert d["ok"] is True
        assert d["total_curvature"] == pytest.approx(2.0 * math.pi)

    def test_negative_allowance_rejected(self):
        with pytest.raises(InvalidParameterError):
            projection_bound_report(unit_square(), (0.5, 0.5, 0.0), allowance=-1.0)


class TestCurveValidation:
    def test_repeated_vertex_rejected(self):
        pts = np.array([[0, 0, 0], [0, 0, 0], [1, 1, 0]], dtype=float)
        with pytest.raises(InvalidParameterError):
            PolylineCurve(pts)

    def test_self_crossing_rejected(self):
        pts = np.array(
            [[0, 0, 0], [2, 2, 0], [2, 0, 0], [0, 2, 0]], dtype=float
        )  # bowtie
        with pytest.raises(InputInconsistentError):
            PolylineCurve(pts)

    def test_flag_index_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            PolylineCurve(unit_square().vertices, corner_flags=(CornerFlag(9, 0.3),))

    def test_flag_index_repeated(self):
        flags = (CornerFlag(1, 0.3), CornerFlag(1, 0.4))
        with pytest.raises(InvalidParameterError):
            PolylineCurve(unit_square().vertices, corner_flags=flags)

    def test_flag_theta_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            PolylineCurve(unit_square().vertices, corner_flags=(CornerFlag(0, 4.0),))

    def test_two_dimensional_points_rejected(self):
        with pytest.raises(InvalidParameterError):
            PolylineCurve(np.array([[0, 0], [1, 0], [0, 1]], dtype=float))


class TestCone:
    def test_unit_cone_area_over_circle(self):
        # cone over a radius-1 circle at height 1 from the origin: each mesh
        # triangle is exact, total = sum of the k flat triangles
        c = regular_polygon(64, z=1.0)
        cone = build_cone(c, (0.0, 0.0, 0.0), kind="unit")
        got = float(cone.mesh.face_areas.sum())
        # side length of the base polygon and slant height of each triangle
        side = 2.0 * math.sin(math.pi / 64)
        slant2 = 2.0 - (side / 2.0) ** 2
        want = 64 * 0.5 * side * math.sqrt(slant2)
        assert got == pytest.approx(want, rel=1e-12)

    def test_unit_cone_apex_on_curve_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_cone(unit_square(), (0.0, 0.0, 0.0), kind="unit")

    def test_exterior_cone_apex_on_curve_allowed(self):
        cone = build_cone(unit_square(), (0.0, 0.0, 0.0), kind="exterior", R=3.0)
        assert cone.mesh.face_areas.sum() > 0.0

    def test_exterior_cone_needs_radius(self):
        with pytest.raises(InvalidParameterError):
            build_cone(regular_polygon(8), (0.0, 0.0, 0.0), kind="exterior")

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_cone(regular_polygon(8), (0.0, 0.0, 0.0), kind="frustum")


class TestPlaneDeviation:
    def test_planar_points_have_zero_deviation(self):
        pts = regular_polygon(10).vertices
        assert best_fit_plane_deviation(pts) <= 1e-12

    def test_lifted_point_registers(self):
        pts = np.array(unit_square().vertices)
        pts[2, 2] = 0.5
        assert best_fit_plane_deviation(pts) > 0.05
