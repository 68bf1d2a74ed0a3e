"""Certificate construction, the delta solver, and status semantics.

The delta oracles are independent bisections of the defining
inequalities written out in closed form here, not calls back into the
library. Status rules under test: a failed hypothesis forces
not-applicable (never violated), the conclusion is still evaluated and
recorded, and digests are deterministic functions of the inputs.
"""

import math

import pytest

from surfcert import (
    Certificate,
    Hypothesis,
    InfeasibleError,
    InvalidParameterError,
    build_scene,
    corner_density_certificate,
    curvature_prefactor,
    delta_for_epsilon,
    density_estimate_certificate,
    embeddedness_certificate,
    genus_bound,
    genus_certificate,
)


def bisect_root(f, lo=1e-12, hi=1.0 - 1e-12, iters=80):
    """Root of a decreasing function on (lo, hi), independent of the library."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestDeltaSolver:
    def test_interior_closed_form(self):
        # at epsilon = 2, alpha = 1 the condition reduces to e^d + d < 2
        want = bisect_root(lambda d: 2.0 - math.exp(d) - d)
        got = delta_for_epsilon(2.0, 1.0, "interior")
        assert got.delta == pytest.approx(want, abs=1e-6)
        assert got.delta == pytest.approx(0.442854, abs=5e-4)

    def test_boundary_closed_form(self):
        # 1.5 (2 - d) > e^d (3 - 2)  <=>  3 - 1.5 d - e^d > 0
        want = bisect_root(lambda d: 3.0 - 1.5 * d - math.exp(d))
        got = delta_for_epsilon(2.0, 1.0, "boundary")
        assert got.delta == pytest.approx(want, abs=1e-6)

    def test_class_membership_closed_form(self):
        # 4/(4 - eps) > e^d / (1 - d) at eps = 2:  e^d = 2 (1 - d)
        want = bisect_root(lambda d: 2.0 * (1.0 - d) - math.exp(d))
        got = delta_for_epsilon(2.0, 1.0, "class_P")
        assert got.delta == pytest.approx(want, abs=1e-6)
        assert got.delta == pytest.approx(0.314923, abs=5e-4)

    def test_returned_delta_keeps_strict_inequality(self):
        for mode in ("interior", "boundary", "class_P"):
            for eps in (0.1, 0.7, 1.3, 2.0):
                sol = delta_for_epsilon(eps, 1.0, mode)
                assert 0.0 < sol.delta < 1.0
                assert sol.margin > 0.0

    def test_monotone_in_epsilon(self):
        deltas = [delta_for_epsilon(e, 1.0, "interior").delta for e in (0.2, 0.8, 1.4, 2.0)]
        assert all(b > a for a, b in zip(deltas, deltas[1:]))

    def test_smaller_alpha_admits_no_less(self):
        d1 = delta_for_epsilon(1.0, 1.0, "interior").delta
        d_half = delta_for_epsilon(1.0, 0.5, "interior").delta
        assert d_half >= d1 - 1e-12

    def test_epsilon_range_enforced(self):
        with pytest.raises(InvalidParameterError):
            delta_for_epsilon(0.0)
        with pytest.raises(InvalidParameterError):
            delta_for_epsilon(2.5)
        with pytest.raises(InvalidParameterError):
            delta_for_epsilon(1.0, alpha=0.0)

    def test_solution_serializes(self):
        d = delta_for_epsilon(1.0).to_dict()
        assert set(d) == {"epsilon", "alpha", "mode", "delta", "margin"}


class TestPrefactor:
    def test_sup_norm_case(self):
        assert curvature_prefactor(math.inf) == (1.0, 1.0)

    def test_p_four(self):
        c, alpha = curvature_prefactor(4.0)
        assert c == pytest.approx(4.0 * (2.0 / math.pi) ** 0.25, rel=1e-12)
        assert alpha == pytest.approx(0.5)

    def test_small_exponent_rejected(self):
        with pytest.raises(InvalidParameterError):
            curvature_prefactor(2.0)


class TestStatusSemantics:
    def make(self, hyp_ok: bool, concl_ok: bool) -> Certificate:
        return Certificate(
            theorem_id="density-lower-bound",
            hypotheses=(Hypothesis("h", "x > 0", 1.0, hyp_ok),),
            conclusion={"satisfied": concl_ok},
            citations=("density-lower-bound",),
            inputs_digest="0" * 64,
        )

    def test_all_good_is_satisfied(self):
        assert self.make(True, True).status == "satisfied"

    def test_failed_conclusion_is_violated(self):
        assert self.make(True, False).status == "violated"

    def test_failed_hypothesis_is_not_applicable_even_if_conclusion_holds(self):
        assert self.make(False, True).status == "not-applicable"
        assert self.make(False, False).status == "not-applicable"

    def test_to_dict_shape(self):
        d = self.make(True, True).to_dict()
        assert set(d) == {
            "theorem",
            "status",
            "hypotheses",
            "conclusion",
            "citations",
            "inputs_digest",
        }
        (h,) = d["hypotheses"]
        assert set(h) == {"name", "required", "measured", "ok", "source"}
        assert h["source"] == "measured"


@pytest.fixture(scope="module")
def disk():
    return build_scene("flat_disk")


@pytest.fixture(scope="module")
def cap32():
    return build_scene("cap", res=32)


class TestDensityCertificate:
    def test_flat_disk_is_the_equality_case(self, disk):
        cert = density_estimate_certificate(
            disk.surface, disk.boundaries, (0.0, 0.0, 0.0), math.inf
        )
        assert cert.status == "satisfied"
        assert cert.conclusion["point_slack"] == pytest.approx(0.0, abs=1e-9)

    def test_cap_has_the_expected_slack(self, cap32):
        cert = density_estimate_certificate(
            cap32.surface, cap32.boundaries, cap32.default_x0, math.inf
        )
        assert cert.status == "satisfied"
        assert cert.conclusion["point_slack"] == pytest.approx(0.46, abs=0.02)

    def test_only_smallness_hypotheses_needed(self, disk):
        cert = density_estimate_certificate(
            disk.surface, disk.boundaries, (0.0, 0.0, 0.0), math.inf
        )
        assert all(h.ok for h in cert.hypotheses)
        names = [h.name for h in cert.hypotheses]
        assert not any("turning" in n for n in names)


class TestEmbeddednessCertificate:
    def test_disk_interior(self, disk):
        cert = embeddedness_certificate(disk.surface, disk.boundaries, math.inf)
        assert cert.status == "satisfied"
        assert cert.conclusion["intersection_free"] is True

    def test_cap_full(self, cap32):
        cert = embeddedness_certificate(
            cap32.surface, cap32.boundaries, math.inf, which="full"
        )
        assert cert.status == "satisfied"

    def test_hemisphere_fails_smallness(self):
        hemi = build_scene("hemisphere", res=32)
        cert = embeddedness_certificate(hemi.surface, hemi.boundaries, math.inf)
        # scaled curvature 2 * diameter = 4 is far above any admissible delta
        assert cert.status == "not-applicable"
        assert any(not h.ok for h in cert.hypotheses)
        # the conclusion is still evaluated and recorded
        assert "intersection_free" in cert.conclusion

    def test_branched_disk_is_not_certified(self):
        br = build_scene("branched_disk", res=32)
        cert = embeddedness_certificate(br.surface, br.boundaries, math.inf)
        assert cert.status != "satisfied"

    def test_which_validated(self, disk):
        with pytest.raises(InvalidParameterError):
            embeddedness_certificate(disk.surface, disk.boundaries, math.inf, which="x")


class TestCornerCertificate:
    def test_right_angle_sector(self):
        sec = build_scene("flat_sector")
        entry = next(
            f.index for f in sec.boundary.corner_flags if abs(f.theta - math.pi / 2) < 1e-9
        )
        cert = corner_density_certificate(sec.surface, sec.boundary, entry)
        assert cert.status == "satisfied"
        assert cert.conclusion["measured"] == pytest.approx(0.25, abs=0.02)

    def test_unflagged_vertex_rejected(self, disk):
        with pytest.raises(InvalidParameterError):
            corner_density_certificate(disk.surface, disk.boundary, 0)

    def test_needs_single_curve(self, disk):
        with pytest.raises(InvalidParameterError):
            corner_density_certificate(disk.surface, list(disk.boundaries), 0)


class TestGenusCertificate:
    def test_bound_formula(self):
        # chi_min = -(tc + 3 pi d^2)/(2 pi); bound = (2 - chi_min - b)/2
        assert genus_bound(2.0 * math.pi, 1.0, 1) == pytest.approx(1.75, abs=1e-12)
        assert genus_bound(2.0 * math.pi, 0.0, 1) == pytest.approx(1.0, abs=1e-12)

    def test_disk_at_zero_scale(self, disk):
        cert = genus_certificate(disk.surface, disk.boundaries, 0.0)
        assert cert.status == "satisfied"
        assert cert.conclusion["genus"] == 0

    def test_torus_keeps_its_handle(self):
        t = build_scene("torus_minus_disk", res=48)
        cert = genus_certificate(t.surface, t.boundaries, 0.5)
        assert cert.status == "satisfied"
        assert cert.conclusion["genus"] == 1
        assert cert.conclusion["bound"] >= 1.0

    def test_negative_scale_rejected(self, disk):
        with pytest.raises(InvalidParameterError):
            genus_certificate(disk.surface, disk.boundaries, -0.1)
        with pytest.raises(InvalidParameterError):
            genus_certificate(disk.surface, disk.boundaries, math.inf)

    def test_two_boundary_loops_disqualify(self):
        cat = build_scene("catenoid", res=32)
        cert = genus_certificate(cat.surface, cat.boundaries, 0.0)
        assert cert.status == "not-applicable"
        assert any(not h.ok for h in cert.hypotheses)


class TestDigests:
    def test_same_inputs_same_digest(self, disk):
        a = genus_certificate(disk.surface, disk.boundaries, 0.0)
        b = genus_certificate(disk.surface, disk.boundaries, 0.0)
        assert a.inputs_digest == b.inputs_digest
        assert len(a.inputs_digest) == 64

    def test_different_inputs_different_digest(self, disk):
        a = genus_certificate(disk.surface, disk.boundaries, 0.0)
        b = genus_certificate(disk.surface, disk.boundaries, 0.5)
        assert a.inputs_digest != b.inputs_digest

    def test_operations_do_not_collide(self, disk):
        g = genus_certificate(disk.surface, disk.boundaries, 0.0)
        e = embeddedness_certificate(disk.surface, disk.boundaries, math.inf)
        assert g.inputs_digest != e.inputs_digest
