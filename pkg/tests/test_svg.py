import xml.etree.ElementTree as ET

import pytest
from hypothesis import given
from hypothesis import strategies as st

from planvec.errors import SvgParseError
from planvec.geometry import VectorPlan, WallRect
from planvec.svg import SVG_NS, parse_svg, to_svg


@st.composite
def plans(draw):
    w, h = draw(st.integers(1, 2000)), draw(st.integers(1, 2000))
    walls = []
    for _ in range(draw(st.integers(0, 15))):
        x0 = draw(st.integers(0, w - 1))
        y0 = draw(st.integers(0, h - 1))
        walls.append(WallRect(x0, y0, draw(st.integers(x0 + 1, w)), draw(st.integers(y0 + 1, h))))
    return VectorPlan(w, h, tuple(walls))


def test_empty_plan():
    text = to_svg(VectorPlan(100, 100))
    assert text == (
        '<svg xmlns="http://www.w3.org/2000/svg" width="100" height="100" viewBox="0 0 100 100">\n'
        "</svg>\n"
    )
    assert parse_svg(text) == VectorPlan(100, 100)


def test_single_wall():
    text = to_svg(VectorPlan(30, 30, (WallRect(0, 0, 20, 4),)))
    assert '<path d="M 0 0 H 20 V 4 H 0 Z" fill="#000000"/>' in text.splitlines()


def test_twelve_walls_twelve_paths():
    walls = tuple(WallRect(0, 10 * i, 50, 10 * i + 4) for i in range(12))
    root = ET.fromstring(to_svg(VectorPlan(100, 200, walls)))
    assert len(root.findall(f"{{{SVG_NS}}}path")) == 12


@given(plans())
def test_round_trip(plan):
    assert parse_svg(to_svg(plan)) == plan


@given(plans())
def test_dialect(plan):
    text = to_svg(plan)
    assert text.endswith("</svg>\n") and "\r" not in text
    root = ET.fromstring(text)
    assert root.tag == f"{{{SVG_NS}}}svg"
    assert root.get("viewBox") == f"0 0 {plan.canvas_width} {plan.canvas_height}"
    paths = list(root)
    assert len(paths) == len(plan.walls)
    for p, w in zip(paths, plan.walls):
        assert p.tag == f"{{{SVG_NS}}}path" and set(p.attrib) == {"d", "fill"}
        assert p.get("d") == f"M {w.x0} {w.y0} H {w.x1} V {w.y1} H {w.x0} Z"
    assert to_svg(plan).encode() == text.encode()


class TestRejects:
    BASE = to_svg(VectorPlan(50, 50, (WallRect(0, 0, 20, 4),)))

    def test_rotated(self):
        bad = self.BASE.replace('fill="#000000"/>', 'fill="#000000" transform="rotate(45)"/>')
        with pytest.raises(SvgParseError) as e:
            parse_svg(bad)
        assert e.value.line == 2

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda t: t.replace('viewBox="0 0 50 50"', 'viewBox="0 0 50 60"'),
            lambda t: t.replace("</svg>\n", ""),
            lambda t: t.replace("H 0 Z", "H 1 Z"),
            lambda t: t.replace("M 0 0 H 20", "M 20 0 H 0"),
            lambda t: t.replace("H 20 V 4", "H 90 V 4"),
            lambda t: "",
            lambda t: "<svg>\n</svg>\n",
        ],
    )
    def test_outside_dialect(self, mutate):
        with pytest.raises(SvgParseError):
            parse_svg(mutate(self.BASE))
