import numpy as np
import pytest

from conftest import random_tetra, regular_tetra
from monotet.geometry import FACES, GeometryError, Tetrahedron, convex_hull
from monotet.tipping import (
    AMBIGUOUS,
    STABLE,
    MarginalStabilityError,
    Stability,
    chain_lengths,
    classify_batch,
    classify_many,
    face_stability,
    falling_pattern,
    heppes_search,
    height_above,
    is_stable_face,
    lowering_pivots,
    obtuse_paths,
    pattern_codes,
    tip_step,
    tumble_sequence,
)

CORNER = Tetrahedron([[0, 0, 0], [10, 0, 0], [0, 10, 0], [0, 0, 10]])
# face D (z = 0) with an obtuse dihedral along edge ac
LEANING = Tetrahedron([[0, 0, 0], [10, 0, 0], [0, 10, 0], [-5, 3, 10]])


def interior_points(t, rng, n):
    w = rng.dirichlet(np.ones(4), size=n)
    return w @ t.points


def test_regular_and_corner_all_stable():
    for t in (regular_tetra(), CORNER):
        p = falling_pattern(t, t.centroid)
        assert p.stable_faces == list(FACES)
        assert all(is_stable_face(t, t.centroid, f) for f in FACES)


def test_obtuse_paths_of_simple_shapes(ref_tetra):
    assert obtuse_paths(regular_tetra()) == []
    assert obtuse_paths(CORNER) == []  # right angles are not obtuse
    (path,) = obtuse_paths(ref_tetra)
    assert path.order == "abcd"
    assert all(a > 90 for a in path.angles)


def test_tip_over_single_edge():
    com = 0.1 * LEANING["a"] + 0.1 * LEANING["b"] + 0.2 * LEANING["c"] + 0.6 * LEANING["d"]
    r = tip_step(LEANING, com, "D")
    assert (r.kind, r.edge, r.next_face) == ("tips", "ac", "B")
    assert not is_stable_face(LEANING, com, "D")


def test_marginal_projection_raises():
    com = np.array([0.0, 2.9, 3.0])  # projects onto edge ac of face D
    assert face_stability(LEANING.as_polytope(), com, 3) is Stability.MARGINAL
    with pytest.raises(MarginalStabilityError):
        is_stable_face(LEANING, com, "D")
    assert tip_step(LEANING, com, "D").kind == "marginal"


def test_com_must_be_interior():
    with pytest.raises(GeometryError):
        tip_step(CORNER, [20.0, 20.0, 20.0], "D")


def test_ambiguous_vertex_wedge(rng):
    found = 0
    for _ in range(200):
        t = random_tetra(rng)
        coms = interior_points(t, rng, 200)
        codes = classify_batch(t, coms)
        for k, fi in np.argwhere(codes == AMBIGUOUS)[:3]:
            r = tip_step(t, coms[k], FACES[fi])
            assert r.kind == "ambiguous"
            assert r.vertex in "abcd".replace(FACES[fi].lower(), "")
            found += 1
        if found >= 10:
            break
    assert found >= 10


def test_energy_oracle_agrees_with_projection_rule(rng):
    for _ in range(300):
        t = random_tetra(rng)
        poly = t.as_polytope()
        com = interior_points(t, rng, 1)[0]
        for fi, f in enumerate(FACES):
            r = tip_step(t, com, f)
            pivots = lowering_pivots(poly, com, fi)
            labelled = {"".join(sorted("abcd"[i] for i in e)) for e in pivots}
            if r.kind == "stable":
                assert labelled == set()
            elif r.kind == "tips":
                assert labelled == {r.edge}
            elif r.kind == "ambiguous":
                assert len(labelled) == 2


def test_classify_batch_matches_scalar_path(rng):
    for _ in range(30):
        t = random_tetra(rng)
        coms = interior_points(t, rng, 20)
        codes = classify_batch(t, coms)
        for com, row in zip(coms, codes):
            assert np.array_equal(row, pattern_codes(falling_pattern(t, com)))


def test_tumble_from_stable_face_is_singleton():
    trace = tumble_sequence(CORNER, CORNER.centroid, "D")
    assert trace.faces == ["D"] and trace.outcome == "stable"


def test_tumble_heights_decrease(rng):
    for _ in range(200):
        t = random_tetra(rng)
        com = interior_points(t, rng, 1)[0]
        for f in FACES:
            h = tumble_sequence(t, com, f).heights
            assert all(b < a for a, b in zip(h, h[1:]))


def test_tumble_on_general_polytope(rng):
    hull = convex_hull(rng.standard_normal((40, 3)) * [30, 20, 10])
    com = hull.vertices.mean(axis=0)
    for fi in range(len(hull.facets)):
        trace = tumble_sequence(hull, com, fi)
        assert trace.faces[0] == fi
        if trace.outcome == "stable":
            assert tip_step(hull, com, trace.faces[-1]).is_stable
        h = [height_above(hull, com, g) for g in trace.faces]
        assert h == pytest.approx(trace.heights)


def test_conway_guy_quick(rng):
    P = 100 * rng.standard_normal((2000, 4, 3))
    codes = classify_many(P, P.mean(axis=1))
    assert np.all((codes == STABLE).sum(axis=1) >= 2)


def test_chain_lengths_simple():
    codes = np.array([[STABLE, 0, 1, 2], [AMBIGUOUS, 0, STABLE, STABLE]])
    assert chain_lengths(codes).tolist() == [[1, 2, 3, 4], [-1, -1, 1, 1]]


def test_heppes_search_finds_double_tumble():
    hit = heppes_search(np.random.default_rng(7), max_samples=200_000)
    assert hit is not None
    t, start, used = hit
    trace = tumble_sequence(t, t.centroid, start)
    assert len(trace) >= 3 and trace.outcome == "stable"


def test_heppes_fixture_replays():
    from monotet.scene import load_scene
    from pathlib import Path
    scene = load_scene(Path(__file__).parent / "data" / "heppes_tetra.yaml")
    t = scene.tetrahedron
    traces = [tumble_sequence(t, t.centroid, f) for f in FACES]
    assert max(len(tr) for tr in traces) == 3
