import xml.etree.ElementTree as ET

import pytest

from gcso.fibers import is_lagrangian
from gcso.ladder import LadderSpec, build_ladder
from gcso.polytope import correspondence, diagram_faces
from gcso.render import render_ascii, render_many_svg, render_svg

SVG_NS = "{http://www.w3.org/2000/svg}"
OG15 = LadderSpec(5, (3, 0))


def test_empty_diagram_is_just_the_origin():
    assert render_ascii(build_ladder(LadderSpec(2, (0,)))) == "o\n"
    root = ET.fromstring(render_svg(build_ladder(LadderSpec(2, (0,)))))
    assert root.find(f"{SVG_NS}circle").get("class") == "origin"


def test_og15_grid():
    text = render_ascii(build_ladder(OG15))
    lines = text.splitlines()
    assert len(lines) == 3 * 2 + 1
    assert lines[0] == "+───+"
    assert lines[-1].startswith("o")
    assert "┃" not in text and "━" not in text


def test_w0_shows_an_i_column():
    w0 = correspondence(OG15).face_of_vector((0, 0, 0))
    text = render_ascii(w0.diagram, w0)
    assert text.count("I") == 3 and "L" not in text


def test_top_face_shows_three_l_cells():
    top = correspondence(OG15).faces[-1]
    text = render_ascii(top.diagram, top)
    assert text.count("L") == 3
    assert "┃" in text


@pytest.mark.parametrize("spec", [OG15, LadderSpec(6, (3, 3, 3)), LadderSpec(7, (3, 2, 1))])
def test_renderers_are_deterministic(spec):
    face = diagram_faces(spec)[len(diagram_faces(spec)) // 2]
    d = build_ladder(spec)
    assert render_ascii(d, face) == render_ascii(d, face)
    assert render_svg(d, face) == render_svg(d, face)


def test_svg_classes_match_the_filling():
    top = correspondence(OG15).faces[-1]
    root = ET.fromstring(render_svg(top.diagram, top, title="top & co"))
    assert root.find(f"{SVG_NS}title").text == "top & co"
    assert len(root.findall(f"{SVG_NS}rect[@class='L-block']")) == 3


def test_many_faces_one_group_each():
    spec = LadderSpec(6, (3, 3, 3))
    lag = [f for f in diagram_faces(spec) if is_lagrangian(f)]
    root = ET.fromstring(render_many_svg(build_ladder(spec), lag))
    groups = root.findall(f"{SVG_NS}g")
    assert [g.get("id") for g in groups] == [f"face-{f.id}" for f in lag]
