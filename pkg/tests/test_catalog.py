"""Catalog scenes: closed-form areas, boundary wiring, and rescaling.

Each scene's boundary curves must reference the mesh loops
vertex-for-vertex, since every downstream bound assumes the curve and
the mesh edge agree exactly.
"""

import math

import numpy as np
import pytest

from surfcert import (
    InvalidParameterError,
    build_scene,
    catalog_entry,
    catalog_names,
    density,
    genus,
    scaled_scene,
)

ALL_NAMES = [
    "branched_disk",
    "cap",
    "catenoid",
    "enneper",
    "flat_disk",
    "flat_sector",
    "graph_disk",
    "hemisphere",
    "torus_minus_disk",
]


class TestListing:
    def test_names_are_sorted_and_complete(self):
        assert catalog_names() == ALL_NAMES

    def test_unknown_name_lists_alternatives(self):
        with pytest.raises(InvalidParameterError, match="available"):
            build_scene("moebius")

    def test_entry_carries_schema_and_doc(self):
        e = catalog_entry("cap")
        assert e.name == "cap"
        assert set(e.schema) == {"R", "theta"}
        assert e.doc

    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_every_scene_builds_at_low_res(self, name):
        scene = build_scene(name, res=16)
        s = scene.surface
        assert s.n_faces > 0
        assert len(scene.boundaries) == len(s.boundary_loops)

    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_boundary_curves_match_mesh_loops(self, name):
        scene = build_scene(name, res=16)
        for curve, loop in zip(scene.boundaries, scene.surface.boundary_loops):
            assert np.array_equal(curve.vertices, scene.surface.vertices[loop])


class TestClosedFormAreas:
    def test_disk(self):
        assert float(build_scene("flat_disk").surface.face_areas.sum()) == pytest.approx(
            math.pi, rel=2e-3
        )

    def test_sector(self):
        # quarter disk of radius 1
        got = float(build_scene("flat_sector").surface.face_areas.sum())
        assert got == pytest.approx(math.pi / 4.0, rel=2e-3)

    def test_cap(self):
        got = float(build_scene("cap").surface.face_areas.sum())
        assert got == pytest.approx(2.0 * math.pi * 100.0 * (1.0 - math.cos(0.1)), rel=2e-3)

    def test_catenoid(self):
        # area of the catenoid x^2+y^2 = cosh(z)^2 for |z| <= h:
        # pi (sinh(2h)/... ) with a=1: 2 pi int_-h^h cosh^2 = pi (sinh(2h) + 2h)
        h = 0.75  # default height 1.5 split symmetrically
        want = math.pi * (math.sinh(2 * h) + 2 * h)
        got = float(build_scene("catenoid").surface.face_areas.sum())
        assert got == pytest.approx(want, rel=5e-3)


class TestParameters:
    def test_defaults_recorded(self):
        scene = build_scene("cap")
        assert scene.parameters["R"] == 10.0
        assert scene.parameters["theta"] == 0.1
        assert scene.provenance == "catalog:cap"

    def test_unknown_parameter_rejected(self):
        with pytest.raises(InvalidParameterError, match="unknown parameters"):
            build_scene("cap", {"bogus": 1.0})

    def test_out_of_range_parameter_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_scene("cap", {"theta": 3.5})  # beyond pi
        with pytest.raises(InvalidParameterError):
            build_scene("cap", {"R": -1.0})

    def test_res_bounds(self):
        with pytest.raises(InvalidParameterError):
            build_scene("flat_disk", res=2)
        with pytest.raises(InvalidParameterError):
            build_scene("flat_disk", res=4096)

    def test_integer_parameter_coercion(self):
        scene = build_scene("graph_disk", {"seed": 1.0}, res=16)
        assert scene.parameters["seed"] == 1
        assert isinstance(scene.parameters["seed"], int)

    def test_scene_cache_returns_identical_objects(self):
        assert build_scene("flat_disk") is build_scene("flat_disk")
        assert build_scene("flat_disk", res=16) is not build_scene("flat_disk", res=32)

    def test_graph_seeds_give_different_surfaces(self):
        g0 = build_scene("graph_disk", {"seed": 0}, res=16)
        g1 = build_scene("graph_disk", {"seed": 1}, res=16)
        assert not np.allclose(g0.surface.vertices, g1.surface.vertices)


class TestSectorFlags:
    def test_three_right_angle_corners(self):
        scene = build_scene("flat_sector")
        flags = scene.boundary.corner_flags
        assert len(flags) == 3
        for f in flags:
            assert f.theta == pytest.approx(math.pi / 2.0, abs=1e-12)

    def test_apex_flag_sits_at_the_origin(self):
        scene = build_scene("flat_sector")
        apex = min(f.index for f in scene.boundary.corner_flags)
        v = scene.boundary.vertices[apex]
        assert np.linalg.norm(v) <= 1e-12


class TestBranchedDisk:
    def test_branch_point_density_matches_sheet_count(self):
        scene = build_scene("branched_disk", res=48)
        assert scene.surface.dim == 4  # two sheets separated in the 4th axis
        m = scene.parameters["m"]
        got = density(scene.surface, np.zeros(4))
        assert got == pytest.approx(float(m), abs=0.02)


class TestTopologyByName:
    def test_torus_minus_disk(self):
        scene = build_scene("torus_minus_disk", res=32)
        assert genus(scene.surface) == 1
        assert len(scene.surface.boundary_loops) == 1

    def test_catenoid_annulus(self):
        scene = build_scene("catenoid", res=16)
        assert genus(scene.surface) == 0
        assert len(scene.surface.boundary_loops) == 2


class TestScaling:
    def test_area_scales_quadratically(self):
        base = build_scene("flat_sector")
        big = scaled_scene(base, 2.0)
        assert float(big.surface.face_areas.sum()) == pytest.approx(
            4.0 * float(base.surface.face_areas.sum()), rel=1e-12
        )

    def test_flags_and_anchor_survive(self):
        base = build_scene("flat_sector")
        lam = 3.0
        big = scaled_scene(base, lam)
        assert big.boundary.corner_flags == base.boundary.corner_flags
        assert np.allclose(big.default_x0, lam * np.asarray(base.default_x0))
        assert big.provenance.startswith(base.provenance)

    def test_meshonly_scene_scales(self):
        base = build_scene("torus_minus_disk", res=16)
        big = scaled_scene(base, 0.5)
        assert float(big.surface.face_areas.sum()) == pytest.approx(
            0.25 * float(base.surface.face_areas.sum()), rel=1e-12
        )

    def test_scale_factor_validated(self):
        base = build_scene("flat_disk", res=16)
        with pytest.raises(InvalidParameterError):
            scaled_scene(base, 0.0)
        with pytest.raises(InvalidParameterError):
            scaled_scene(base, -2.0)
