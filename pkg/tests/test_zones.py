import numpy as np
import pytest

from conftest import random_tetra, regular_tetra
from monotet.geometry import HalfSpace, face_plane, halfspace_intersection, volume_centroid
from monotet.patterns import parse_pattern
from monotet.tipping import FallingPattern, classify_batch, falling_pattern, obtuse_paths, pattern_codes
from monotet.zones import (
    chain_patterns,
    enumerate_zones,
    loading_zone,
    monostable_zones,
    pattern_halfspaces,
    zone_type,
)

TABLE = {"B->A->D<-C": (1.4318, "I"), "C->D->A<-B": (0.5716, "I"),
         "B->A->D->C": (0.0199, "II"), "C->D->A->B": (0.0067, "II")}


def test_halfspace_counts(ref_tetra):
    assert len(pattern_halfspaces(ref_tetra, parse_pattern("B->A->D<-C"))) == 16
    t = regular_tetra()
    all_stable = FallingPattern({f: None for f in "ABCD"})
    hs = pattern_halfspaces(t, all_stable)
    assert len(hs) == 16
    assert all(h.contains(t.centroid) for h in hs)


def test_regular_tetra_not_loadable():
    t = regular_tetra()
    rep = enumerate_zones(t, all_maps=True)
    assert not rep.loadable and rep.zones == []
    assert loading_zone(t, parse_pattern("B->A->D<-C")).empty


def test_reference_zones(ref_report):
    got = {str(z.pattern): (z.volume_cm3, z.zone_type) for z in ref_report.zones}
    assert set(got) == set(TABLE)
    for k, (vol, typ) in TABLE.items():
        assert got[k][1] == typ
        assert got[k][0] == pytest.approx(vol, rel=0.02)
    assert ref_report.total_volume_cm3 == pytest.approx(668.624, rel=0.005)


def test_all_maps_search_agrees_with_path_search(ref_tetra, ref_report):
    found = {z.pattern: z.volume_cm3 for z in monostable_zones(ref_tetra)}
    assert found == pytest.approx({z.pattern: z.volume_cm3 for z in ref_report.zones})


def test_zone_types(ref_path):
    assert zone_type(parse_pattern("B->A->D<-C"), ref_path) == "I"
    assert zone_type(parse_pattern("C->D->A->B"), ref_path) == "II"
    assert zone_type(parse_pattern("C->D->A<-B"), ref_path) == "I"
    with pytest.raises(ValueError):
        zone_type(parse_pattern("A->B->C->D"), ref_path)


def test_chain_patterns_are_monostable(ref_path):
    ps = chain_patterns(ref_path)
    assert [p.sink for p in ps] == ["D", "A", "C", "B"]


def test_zone_volume_against_monte_carlo(ref_tetra, ref_report, rng):
    # rejection sampling in the tetra bounding box of each zone region
    for z in ref_report.zones[:2]:
        V = z.region.vertices
        lo, hi = V.min(axis=0), V.max(axis=0)
        pts = rng.uniform(lo, hi, size=(200_000, 3))
        codes = classify_batch(ref_tetra, pts)
        hit = np.all(codes == pattern_codes(z.pattern), axis=1) & ref_tetra.as_polytope().contains(pts)
        box = np.prod(hi - lo) / 1000
        frac = hit.mean()
        se = box * np.sqrt(frac * (1 - frac) / len(pts))
        assert abs(box * frac - z.volume_cm3) < 4 * se


def test_zone_samples_reproduce_pattern(ref_tetra, ref_report, rng):
    for z in ref_report.zones:
        pts = z.region.sample_uniform(2000, rng)
        for com in pts[:20]:
            assert falling_pattern(ref_tetra, com) == z.pattern


def test_loadability_equivalence_small(rng, ref_tetra):
    for k in range(60):
        if k % 2:
            t = random_tetra(rng)
        else:
            t = type(ref_tetra)(ref_tetra.points + 20 * rng.standard_normal((4, 3)))
        assert bool(monostable_zones(t)) == bool(obtuse_paths(t))


def test_tetra_from_its_face_halfspaces(rng):
    t = random_tetra(rng)
    poly = halfspace_intersection([HalfSpace(face_plane(t, f)) for f in "ABCD"])
    got = poly.vertices[np.lexsort(poly.vertices.T)]
    want = t.points[np.lexsort(t.points.T)]
    assert np.allclose(got, want, atol=1e-9)
    assert volume_centroid(poly).volume == pytest.approx(t.volume)


def test_random_bundle_volume_against_monte_carlo(rng):
    N = rng.standard_normal((8, 3))
    hs = [HalfSpace.from_normal(n, 1.0) for n in N]
    box = [HalfSpace.from_normal(s * np.eye(3)[k], 2.0) for k in range(3) for s in (1, -1)]
    poly = halfspace_intersection(hs + box)
    pts = rng.uniform(-2, 2, size=(300_000, 3))
    inside = np.all(pts @ N.T <= 1.0, axis=1)
    frac = inside.mean()
    se = 64 * np.sqrt(frac * (1 - frac) / len(pts))
    assert abs(volume_centroid(poly).volume - 64 * frac) < 3 * se
