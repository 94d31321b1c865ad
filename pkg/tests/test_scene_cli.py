import io

import numpy as np
import pytest
import yaml

from conftest import regular_tetra
from monotet import cli
from monotet.geometry import convex_hull, volume_centroid
from monotet.scene import (
    SceneError,
    dump_scene,
    lander_mesh,
    load_mesh,
    load_scene,
    parse_obj,
    parse_off,
    reference_scene,
    write_off,
)


def run(argv):
    out = io.StringIO()
    code = cli.run(argv, out=out)
    return code, out.getvalue()


@pytest.fixture
def regular_scene(tmp_path):
    path = tmp_path / "regular.yaml"
    dump_scene(path, regular_tetra())
    return path


def test_reference_scene_has_provenance():
    s = reference_scene()
    assert "Reconstructed" in s.provenance
    assert s.tetrahedron.volume == pytest.approx(668_624, rel=0.005)


def test_scene_round_trip(tmp_path, rng):
    t = regular_tetra().transformed(translation=rng.standard_normal(3))
    path = tmp_path / "s.yaml"
    dump_scene(path, t, com=t.centroid, provenance="test")
    s = load_scene(path)
    assert np.allclose(s.tetrahedron.points, t.points)
    assert np.allclose(s.com, t.centroid)


@pytest.mark.parametrize("units", [None, {"length": "cm", "density": "g/cm3"}, {"density": "g/cm3"},
                                   {"length": "mm"}])
def test_scene_units_are_enforced(tmp_path, units):
    data = {"tetrahedron": {k: v.tolist() for k, v in regular_tetra().vertices.items()}}
    if units is not None:
        data["units"] = units
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(data))
    with pytest.raises(SceneError):
        load_scene(path)


def test_off_and_obj_parsers_agree():
    off = "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n"
    obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 1 4 3\nf 2 3 4\n"
    a, b = parse_off(off), parse_obj(obj)
    assert np.array_equal(a.triangles, b.triangles)
    assert a.volume_centroid()[0] == pytest.approx(1 / 6)
    with pytest.raises(SceneError):
        parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 9\n")


def test_lander_mesh_hull(tmp_path):
    mesh = lander_mesh()
    path = tmp_path / "lander.off"
    write_off(path, mesh)
    again = load_mesh(path)
    vol, _ = again.volume_centroid()
    assert vol == pytest.approx(80 * 80 * 200 + 4 * 12 * 12 * 55)
    hull = convex_hull(again.vertices)
    assert hull.n_vertices < len(again.vertices)
    assert volume_centroid(hull).volume > vol
    code, text = run(["hull", "--mesh", str(path)])
    assert code == 0
    assert "stable_facets" in text and "euler: 2" in text


def test_cli_zones_table_matches_reference():
    code, text = run(["zones", "--format", "table"])
    assert code == 0
    for row in ("B->A->D<-C       I.    1.4318 cm3", "C->D->A<-B       I.    0.5716 cm3",
                "B->A->D->C       II.   0.0199 cm3", "C->D->A->B       II.   0.0067 cm3"):
        assert row in text
    assert "Volume of entire tetrahedron is 668.62" in text


def test_cli_output_is_deterministic():
    a = run(["zones", "--samples", "2000", "--seed", "3"])
    b = run(["zones", "--samples", "2000", "--seed", "3"])
    assert a == b and a[0] == 0
    assert "agreement: 1.000000" in a[1]


def test_cli_analyze_regular(regular_scene):
    code, text = run(["analyze", "--scene", str(regular_scene)])
    assert code == 0 and "loadable: false" in text
    assert "ab: 70.5288" in text


def test_cli_simulate_zone_centroid():
    code, text = run(["simulate", "--pattern", "B->A->D<-C", "--format", "table"])
    assert code == 0
    assert "falling_pattern: B->A->D<-C" in text
    assert "faces: B->A->D" in text


def test_cli_exit_codes(tmp_path, regular_scene):
    assert run(["simulate", "--pattern", "A->B->A<-C"])[0] == cli.EXIT_PARSE
    assert run(["analyze", "--scene", str(tmp_path / "missing.yaml")])[0] == cli.EXIT_PARSE
    assert run(["frobnicate"])[0] == cli.EXIT_PARSE
    flat = tmp_path / "flat.yaml"
    flat.write_text(yaml.safe_dump({"units": {"length": "mm", "density": "g/cm3"},
                                    "tetrahedron": {"a": [0, 0, 0], "b": [1, 0, 0], "c": [0, 1, 0],
                                                    "d": [1, 1, 0]}}))
    assert run(["analyze", "--scene", str(flat)])[0] == cli.EXIT_GEOMETRY
    assert run(["design", "--scene", str(regular_scene)])[0] == cli.EXIT_INFEASIBLE


def test_cli_design_reports_infeasible_density():
    code, text = run(["design", "--density", "1.0"])
    assert code == cli.EXIT_INFEASIBLE
    assert "functional: false" in text
