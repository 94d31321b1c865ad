import math

import numpy as np
import pytest

from conftest import regular_tetra
from monotet import design as dz
from monotet.geometry import GeometryError, HalfSpace, Tetrahedron, mm3_to_cm3
from monotet.patterns import parse_pattern
from monotet.tipping import falling_pattern
from monotet.zones import enumerate_zones

FRAME = dz.CARBON_TUBE_FRAME
#: tubes this thin weigh next to nothing
FEATHER = dz.FrameSpec(outer_diameter=1e-6, inner_diameter=0.0)


@pytest.fixture(scope="session")
def type_one(ref_report):
    return ref_report.zone(parse_pattern("B->A->D<-C"))


@pytest.fixture(scope="session")
def ref_fit(ref_tetra, type_one):
    return dz.fit_core(ref_tetra, FRAME, dz.TUNGSTEN_CARBIDE.density, type_one)


def test_material_and_frame_invariants():
    with pytest.raises(ValueError):
        dz.MaterialSpec("void", 0.0)
    with pytest.raises(ValueError):
        dz.FrameSpec(outer_diameter=1.0, inner_diameter=1.0)
    with pytest.raises(ValueError):
        dz.FrameSpec(joint_mass=-1.0)


def test_tube_linear_density():
    want = math.pi / 4 * (1.0**2 - 0.5**2) * 1.36 / 1000  # g/mm
    assert FRAME.linear_density == pytest.approx(want, rel=1e-12)
    assert 10 * FRAME.linear_density == pytest.approx(0.00801, abs=5e-6)  # g/cm


def test_frame_com_of_regular_tetra():
    t = regular_tetra()
    mass, com = dz.frame_model(t, FRAME)
    assert np.allclose(com, t.centroid, atol=1e-12)
    assert mass == pytest.approx(6 * 100 * FRAME.linear_density)


def test_joint_masses_dominate(ref_tetra):
    f = dz.FrameSpec(outer_diameter=1e-9, inner_diameter=0.0, joint_mass=5.0)
    _, com = dz.frame_model(ref_tetra, f)
    assert np.allclose(com, ref_tetra.points.mean(axis=0), atol=1e-9)
    doubled = dz.FrameSpec(outer_diameter=1e-9, inner_diameter=0.0, joint_mass=10.0)
    assert np.allclose(dz.frame_model(ref_tetra, doubled)[1], com, atol=1e-9)


def test_core_filling_whole_tetra(ref_tetra):
    hs = HalfSpace.from_normal([0, 0, 1], 1e4)
    mass, com, region = dz.core_from_plane(ref_tetra, dz.CoreSpec(hs))
    assert mass == pytest.approx(mm3_to_cm3(ref_tetra.volume) * 14.15, rel=1e-12)
    assert np.allclose(com, ref_tetra.centroid)
    assert region.n_vertices == 4


def test_core_touching_a_vertex_is_an_error():
    t = Tetrahedron([[0, 0, 0], [10, 0, 0], [0, 10, 0], [0, 0, 10]])
    with pytest.raises(GeometryError):
        dz.core_from_plane(t, dz.CoreSpec(HalfSpace.from_normal([1, 1, 1], 0.0)))


def test_corner_core_against_monte_carlo(rng):
    t = Tetrahedron([[0, 0, 0], [10, 0, 0], [0, 10, 0], [0, 0, 10]])
    core = dz.CoreSpec(HalfSpace.from_normal([1, 0, 0], 5.0), dz.MaterialSpec("x", 2.0))
    mass, com, _ = dz.core_from_plane(t, core)
    pts = rng.dirichlet(np.ones(4), size=400_000) @ t.points
    hit = pts[:, 0] <= 5
    assert mass / 2.0 * 1000 == pytest.approx(hit.mean() * 1000 / 6, rel=0.01)
    assert np.allclose(com, pts[hit].mean(axis=0), atol=0.02)


def test_mass_model_additivity(ref_tetra, ref_fit):
    for mode in dz.FRAME_MODES:
        mm = dz.mass_model(ref_tetra, FRAME, ref_fit.core, mode)
        direct = (mm.frame_mass * mm.frame_com + mm.core_mass * mm.core_com) / mm.total_mass
        assert np.allclose(mm.com, direct, rtol=1e-12)
        assert ref_tetra.as_polytope().contains(mm.com)
    solid = dz.mass_model(ref_tetra, FRAME, ref_fit.core, "solid")
    tubes = dz.mass_model(ref_tetra, FRAME, ref_fit.core, "tubes")
    assert solid.frame_mass < tubes.frame_mass


def test_reference_design_is_functional(ref_tetra, ref_fit, type_one):
    assert ref_fit.functional
    mm = dz.mass_model(ref_tetra, FRAME, ref_fit.core)
    assert type_one.region.signed_distance(mm.com) == pytest.approx(ref_fit.margin, abs=1e-9)
    p = dz.verify_design(ref_tetra, FRAME, ref_fit.core)
    assert p == type_one.pattern and p.stable_faces == ["D"]


def test_homogeneous_composite_is_not_monostable(ref_tetra, type_one):
    light = dz.frame_model(ref_tetra, FRAME)[0] / mm3_to_cm3(ref_tetra.volume)
    fit = dz.fit_core(ref_tetra, FRAME, light, type_one, mode="solid")
    assert not fit.functional


def test_feather_core_leaves_frame_pattern(ref_tetra, ref_fit):
    p = dz.verify_design(ref_tetra, FRAME, ref_fit.core.with_density(1e-9))
    assert len(p.stable_faces) >= 2
    assert p == falling_pattern(ref_tetra, dz.frame_model(ref_tetra, FRAME)[1])


def test_type_one_threshold_below_tungsten_carbide(ref_tetra, type_one):
    assert dz.min_core_density(ref_tetra, FRAME, type_one) <= 14.15


def test_massless_frame_threshold_goes_to_zero(ref_tetra, type_one):
    assert dz.min_core_density(ref_tetra, FEATHER, type_one) <= 1e-2


def test_fixed_interface_threshold_is_exact(ref_tetra, ref_fit, type_one):
    rho = dz.fixed_interface_density(ref_tetra, FRAME, ref_fit.core, type_one)
    assert 0 < rho < 14.15
    for k, want in ((0.999, False), (1.001, True)):
        com = dz.mass_model(ref_tetra, FRAME, ref_fit.core.with_density(k * rho)).com
        assert (type_one.region.signed_distance(com) > 0) is want


def test_scale_limits(ref_tetra, ref_fit):
    mf, cf = dz.frame_model(ref_tetra, FRAME)
    _, cc, _ = dz.core_from_plane(ref_tetra, ref_fit.core)
    for s, want in ((1e4, cc), (1e-4, cf)):
        ts, cs = dz.scaled_design(ref_tetra, ref_fit.core, s)
        com = dz.mass_model(ts, FRAME, cs).com / s
        assert np.linalg.norm(com - want) < 1e-3 * ref_tetra.diameter


def test_min_scale_brackets_threshold(ref_tetra, ref_fit, type_one):
    s = dz.min_scale(ref_tetra, FRAME, ref_fit.core, type_one)
    assert dz.scaled_margin(ref_tetra, FRAME, ref_fit.core, type_one, s) > 0
    assert dz.scaled_margin(ref_tetra, FRAME, ref_fit.core, type_one, s / 1.005) <= 0


def test_min_scale_infeasible(ref_tetra, ref_fit, ref_report):
    zone = ref_report.zone(parse_pattern("C->D->A->B"))
    with pytest.raises(dz.InfeasibleDesign):
        dz.min_scale(ref_tetra, FRAME, ref_fit.core, zone)


def test_randomised_designs_hit_their_target(ref_tetra, rng):
    checked = 0
    for _ in range(6):
        t = Tetrahedron(ref_tetra.points + 5 * rng.standard_normal((4, 3)))
        rep = enumerate_zones(t)
        for z in rep.zones[:2]:
            fit = dz.fit_core(t, FRAME, 50.0, z)
            if fit.functional:
                assert dz.verify_design(t, FRAME, fit.core) == z.pattern
                checked += 1
    assert checked >= 3
