import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from sametric.disk import DISK_D, DiskPoint
from sametric.fixtures import EUCLID_SQUARE
from sametric.levelset import (Grid, LevelPolyline, SvgSpec, emit_csv, emit_svg, marching_squares, parse_grid_csv,
                               plateau_detect, radial_spread, sample_grid, slope_classify)
from sametric.metric import MetricDescriptor
from sametric.strip import STRIP_DX


def _field(f, n=65, region=((0.0, 1.0), (0.0, 1.0))):
    (xlo, xhi), (ylo, yhi) = region
    X, Y = np.meshgrid(np.linspace(xlo, xhi, n), np.linspace(ylo, yhi, n))
    return Grid(region, n, n, f(X, Y))


def test_constant_field_has_no_curves():
    g = _field(lambda X, Y: np.zeros_like(X))
    assert marching_squares(g, 0.5) == []
    assert plateau_detect(g, 0.0, 0.0) == 1.0


def test_linear_field_gives_a_vertical_line():
    g = _field(lambda X, Y: X)
    (pl,) = marching_squares(g, 0.3)
    v = np.asarray(pl.vertices)
    assert np.allclose(v[:, 0], 0.3) and pl.length == pytest.approx(1.0)
    assert slope_classify([pl])["vertical"] == 1.0


def test_circle_control_is_mostly_other():
    g = _field(lambda X, Y: np.hypot(X, Y), n=513, region=((-1.0, 1.0), (-1.0, 1.0)))
    (pl,) = marching_squares(g, 0.5)
    assert pl.closed
    sc = slope_classify([pl])
    # the arc within 2 degrees of vertical or +-45 degrees is 6 * 4 / 360 of the circumference
    assert sc["other"] == pytest.approx(1 - 24 / 360, abs=0.01)
    assert radial_spread([pl]) < 1e-3


def test_saddle_is_split_into_two_segments():
    g = Grid(((0.0, 1.0), (0.0, 1.0)), 2, 2, np.array([[1.0, 0.0], [0.0, 1.0]]))
    polys = marching_squares(g, 0.5)
    assert len(polys) == 2


def test_nan_cells_are_skipped():
    g = _field(lambda X, Y: np.where(X > 0.5, np.nan, X))
    lines = marching_squares(g, 0.25)
    assert len(lines) == 1


def test_sample_grid_with_and_without_kernel():
    g = sample_grid(STRIP_DX, (0.5, 0.0), nx=17, ny=33)
    assert g.values.shape == (33, 17) and np.isnan(g.values[:, 0]).all()
    assert np.nanmax(g.values) <= 0.5
    g2 = sample_grid(EUCLID_SQUARE, (0.0, 0.0), nx=5)
    assert g2.values[4, 4] == pytest.approx(math.sqrt(2))
    gd = sample_grid(DISK_D, DiskPoint(0.0, 0.0), nx=9)
    assert np.isnan(gd.values[0, 0]) and gd.values[4, 8] == pytest.approx(0.5)


def test_plateau_in_strip_field():
    g = sample_grid(STRIP_DX, (1.0, 0.0), nx=129)
    frac = plateau_detect(g, 0.5, 1e-12)
    assert 0.3 < frac < 0.9


def test_svg_is_valid_xml():
    empty = emit_svg([], SvgSpec())
    root = ET.fromstring(empty.split("\n", 2)[2])
    assert root.tag.endswith("svg")
    pl = LevelPolyline(0.1, [(0.0, 0.0), (1.0, 1.0)])
    text = emit_svg([pl], SvgSpec(region=((0, 1), (0, 1)), title="t"))
    assert "y axis points up" in text and 'points="0.000,512.000 512.000,0.000"' in text


def test_csv_round_trip(tmp_path):
    g = sample_grid(STRIP_DX, (0.7, 0.2), nx=9, ny=5)
    text = emit_csv(g, tmp_path / "g.csv")
    back = parse_grid_csv((tmp_path / "g.csv").read_text())
    assert text.splitlines()[1] == "x,y,value"
    assert back.region == g.region and np.array_equal(back.values, g.values, equal_nan=True)
