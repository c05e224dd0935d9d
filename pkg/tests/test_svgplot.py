import math
import xml.etree.ElementTree as ET

import pytest

from cartansim import ConfigError
from cartansim.svgplot import line_plot


def parse(svg_text):
    return ET.fromstring(svg_text)


def polylines(root):
    return [el for el in root.iter() if el.tag.endswith("polyline")]


def test_single_series_well_formed():
    svg = line_plot([("a", [0, 1, 2], [1.0, 2.0, 3.0])], title="t", xlabel="x", ylabel="y")
    root = parse(svg)
    assert root.tag.endswith("svg")
    assert len(polylines(root)) == 1


def test_one_polyline_per_series():
    series = [
        ("a", [0, 1, 2], [1.0, 2.0, 3.0]),
        ("b", [0, 1, 2], [3.0, 2.0, 1.0]),
        ("c", [0, 1, 2], [2.0, 2.0, 2.0]),
    ]
    root = parse(line_plot(series))
    assert len(polylines(root)) == 3


def test_series_names_appear_in_legend():
    svg = line_plot([("first curve", [0, 1], [1, 2]), ("second curve", [0, 1], [2, 1])])
    assert "first curve" in svg
    assert "second curve" in svg


def test_point_coordinates_inside_viewbox():
    root = parse(line_plot([("a", [0.0, 10.0], [5.0, -5.0])]))
    width = float(root.get("width"))
    height = float(root.get("height"))
    for pl in polylines(root):
        for pair in pl.get("points").split():
            x, y = map(float, pair.split(","))
            assert -1e-6 <= x <= width + 1e-6
            assert -1e-6 <= y <= height + 1e-6


def test_logy_drops_nonpositive_points():
    root = parse(
        line_plot([("a", [0, 1, 2, 3], [1.0, 0.0, -2.0, 10.0])], logy=True)
    )
    (pl,) = polylines(root)
    assert len(pl.get("points").split()) == 2


def test_logy_axis_spans_decades():
    ys = [10.0 ** k for k in range(-12, 1)]
    svg = line_plot([("err", list(range(len(ys))), ys)], logy=True)
    assert "1e-12" in svg or "1e-06" in svg  # decade tick labels present


def test_linear_ticks_are_round_numbers():
    svg = line_plot([("a", [0, 97], [0.0, 0.73])], xlabel="t")
    root = parse(svg)
    texts = [el.text for el in root.iter() if el.tag.endswith("text") and el.text]
    # tick labels parse back to floats with short decimal forms
    nums = []
    for t in texts:
        try:
            nums.append(float(t))
        except ValueError:
            pass
    assert len(nums) >= 4
    for v in nums:
        assert math.isfinite(v)


def test_empty_series_rejected():
    with pytest.raises(ConfigError):
        line_plot([])


def test_length_mismatch_rejected():
    with pytest.raises(ConfigError):
        line_plot([("a", [0, 1, 2], [1.0, 2.0])])


def test_writes_file(tmp_path):
    path = tmp_path / "plot.svg"
    text = line_plot([("a", [0, 1], [1, 2])], str(path))
    assert path.read_text() == text
    parse(path.read_text())


def test_escapes_markup_characters():
    svg = line_plot([("a<b&c", [0, 1], [1, 2])], title="x<y")
    parse(svg)  # would fail on raw < or &
    assert "a<b" not in svg
