import json
import math
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from sorlayout.errors import DuplicateEdge, MissingHeader, ParseError, SelfLoop, UnsupportedDimension
from sorlayout.formats import (
    BenchReport,
    RunRecord,
    aggregate_runs,
    format_table,
    parse_edge_list,
    parse_placement_tsv,
    parse_report_json,
    write_edge_list,
    write_placement_tsv,
    write_report_json,
    write_svg,
    write_trace_json,
)
from sorlayout.graph import Graph, generate_band, generate_grid
from sorlayout.layout import LayoutConfig, NonSOR, run_layout

SVG_NS = "{http://www.w3.org/2000/svg}"


class TestEdgeList:
    def test_minimal(self):
        g = parse_edge_list("vertices 2\n0 1")
        assert g.n == 2 and g.edges == ((0, 1, None),)

    def test_weighted(self):
        g = parse_edge_list("vertices 3\n0 1 2.5\n1 2 3.0")
        assert list(g.lengths()) == [2.5, 3.0]

    def test_comments_and_blanks(self):
        g = parse_edge_list("# a graph\n\nvertices 3  # three\n0 1\n\n1 2 # tail\n")
        assert g.n == 3 and len(g.edges) == 2

    @pytest.mark.parametrize("text,exc", [
        ("vertices 2\n0 0", SelfLoop),
        ("vertices 3\n0 1\n1 0", DuplicateEdge),
        ("0 1\n", MissingHeader),
        ("", MissingHeader),
        ("vertices 2\n0 5", ParseError),
        ("vertices 2\n0 1 -1", ParseError),
        ("vertices 2\n0 1 nan", ParseError),
        ("vertices x\n", ParseError),
        ("vertices 2\n0 1 2 3", ParseError),
    ])
    def test_rejections(self, text, exc):
        with pytest.raises(exc):
            parse_edge_list(text)

    def test_error_carries_line(self):
        with pytest.raises(DuplicateEdge) as info:
            parse_edge_list("vertices 3\n0 1\n# x\n1 0\n")
        assert info.value.line == 4

    @pytest.mark.parametrize("g", [generate_band(46), generate_grid(30),
                                   Graph(3, ((0, 1, 0.1), (1, 2, 1 / 3)))])
    def test_round_trip(self, g):
        assert parse_edge_list(write_edge_list(g)) == g


class TestPlacementTsv:
    def test_origin(self):
        assert write_placement_tsv(np.zeros((1, 2))) == "vertex\tx0\tx1\n0\t0\t0\n"

    def test_line_count(self):
        assert len(write_placement_tsv(np.ones((7, 3))).splitlines()) == 8

    def test_round_trip(self):
        x = np.random.default_rng(0).normal(scale=50, size=(40, 2))
        back = parse_placement_tsv(write_placement_tsv(x))
        np.testing.assert_allclose(back, x, rtol=1e-9, atol=0)

    def test_accepts_trace(self, cycle4):
        tr = run_layout(cycle4, LayoutConfig())
        np.testing.assert_allclose(parse_placement_tsv(write_placement_tsv(tr)), tr.placement, rtol=1e-9)

    def test_bad_header(self):
        with pytest.raises(ParseError):
            parse_placement_tsv("0\t1\t2\n")


class TestSvg:
    def _counts(self, text):
        root = ET.fromstring(text)
        return len(root.findall(f".//{SVG_NS}line")), len(root.findall(f".//{SVG_NS}circle"))

    def test_single_edge(self, single_edge):
        svg = write_svg(np.array([[0.0, 0.0], [1.0, 0.0]]), single_edge)
        assert self._counts(svg) == (1, 2)

    def test_deterministic(self, cycle4):
        x = np.random.default_rng(3).random((4, 2))
        assert write_svg(x, cycle4) == write_svg(x.copy(), cycle4)

    def test_dimension(self, cycle4):
        with pytest.raises(UnsupportedDimension):
            write_svg(np.zeros((4, 3)), cycle4)

    def test_c4_square(self, cycle4):
        tr = run_layout(cycle4, LayoutConfig(rel_err=1e-10, seed=1))
        root = ET.fromstring(write_svg(tr.placement, cycle4))
        assert self._counts(ET.tostring(root, encoding="unicode")) == (4, 4)
        pts = np.array([[float(c.get("cx")), float(c.get("cy"))] for c in root.iter(f"{SVG_NS}circle")])
        side = [np.linalg.norm(pts[i] - pts[(i + 1) % 4]) for i in range(4)]
        diag = [np.linalg.norm(pts[0] - pts[2]), np.linalg.norm(pts[1] - pts[3])]
        np.testing.assert_allclose(side, side[0], rtol=1e-3)
        np.testing.assert_allclose(diag, side[0] * math.sqrt(2), rtol=1e-3)

    def test_margin(self, single_edge):
        root = ET.fromstring(write_svg(np.array([[0.0, 0.0], [1.0, 0.0]]), single_edge))
        xs = sorted(float(c.get("cx")) for c in root.iter(f"{SVG_NS}circle"))
        width = float(root.get("width"))
        assert xs[0] == pytest.approx(0.05 / 1.1 * width, abs=1e-3)
        assert xs[1] == pytest.approx(1.05 / 1.1 * width, abs=1e-3)


def test_trace_json(cycle4):
    tr = run_layout(cycle4, LayoutConfig(strategy=NonSOR()))
    data = json.loads(write_trace_json(tr, {"seed": 1}))
    assert data["iterations"] == len(data["records"]) == tr.iterations
    assert set(data["records"][0]) == {"iteration", "stress", "omega", "accepted", "seconds"}


def _run(strategy, iterations, seed=1, dataset="d"):
    return RunRecord(dataset, 10, strategy, seed, iterations, 0.5 * iterations, 0.4 * iterations, 1.0, "rel_err")


class TestReport:
    def test_single_baseline(self):
        rows = aggregate_runs([_run("none", 100)])
        assert rows[0].iteration_ratio == 1.0 and rows[0].time_ratio == 1.0

    def test_two_strategies(self):
        rep = BenchReport({}, [_run("none", 100), _run("fixed:1.5", 50)])
        rep.aggregates = aggregate_runs(rep.runs)
        assert len(rep.aggregates) == 2
        assert [a.strategy for a in rep.aggregates if a.iteration_ratio == 1.0] == ["none"]
        assert rep.aggregate("d", "fixed:1.5").iteration_ratio == 0.5
        data = json.loads(write_report_json(rep))
        assert data["aggregates"][1]["iteration_ratio"] == 0.5

    def test_failed_runs_excluded(self):
        bad = RunRecord("d", 10, "none", 2, error="boom")
        rows = aggregate_runs([_run("none", 100), bad])
        assert rows[0].failures == 1 and rows[0].mean_iterations == 100

    def test_round_trip(self):
        rep = BenchReport({"seeds": [1, 2]}, [_run("none", 100), _run("none", 120, 2), _run("prob", 70)])
        rep.aggregates = aggregate_runs(rep.runs)
        assert parse_report_json(write_report_json(rep)) == rep

    def test_timings_dropped(self):
        rep = BenchReport({}, [_run("none", 100)])
        rep.aggregates = aggregate_runs(rep.runs)
        text = write_report_json(rep, timings=False)
        assert not re.search(r'"(seconds|loop_seconds|mean_seconds|time_ratio)"', text)

    def test_table(self):
        rep = BenchReport({"rel_err": {"d": 1e-5}}, [_run("none", 100), _run("enum", 40)])
        rep.aggregates = aggregate_runs(rep.runs)
        table = format_table(rep)
        assert "40.0%" in table and "100.0%" in table and "num of iter" in table
