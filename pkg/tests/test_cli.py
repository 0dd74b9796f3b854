import csv
import io
import json

import pytest

from ratdist import elliptic
from ratdist.cli import main

from oracles import MULTIPLES_1_2

CURVE_1_2 = elliptic.CubicCurve(2, -60, 144)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_points(tmp_path, pts, name="pts.json"):
    path = tmp_path / name
    path.write_text(json.dumps([{"label": l, "x": x, "y": y} for l, x, y in pts]))
    return path


SQUARE = [("A", "0", "0"), ("B", "1", "0"), ("C", "1", "1"), ("D", "0", "1")]


class TestMultiples:
    def test_third_multiple(self, capsys):
        code, out, _ = run(capsys, "multiples", "--m", 1, "--n", 2, "--kmax", 3)
        rows = json.loads(out)["multiples"]
        assert code == 0 and len(rows) == 3
        assert rows[2] == {"k": 3, "U": "-189/25", "W": "-2091/125"}

    def test_full_table(self, capsys):
        code, out, _ = run(capsys, "multiples", "--m", "1", "--n", "2", "--kmax", "11")
        rows = json.loads(out)["multiples"]
        assert code == 0
        assert [(r["U"], r["W"]) for r in rows] == MULTIPLES_1_2
        for r in rows:
            assert elliptic.contains(CURVE_1_2, elliptic.CurvePoint.from_json(r))

    def test_singular(self, capsys):
        code, out, _ = run(capsys, "multiples", "--m", 1, "--n", 0)
        assert code == 1 and json.loads(out)["error"] == "SingularParams"

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "m.json"
        code, out, _ = run(capsys, "--out", target, "multiples", "--m", 1, "--n", 2, "--kmax", 2)
        assert code == 0 and out == ""
        assert len(json.loads(target.read_text())["multiples"]) == 2


class TestApproxAndVerify:
    def test_triangle_identity(self, capsys, tmp_path):
        path = write_points(tmp_path, [("A", 0, 0), ("B", 3, 0), ("C", 0, 4)])
        code, out, _ = run(capsys, "approx", "triangle", path, "--eps", "0.1")
        doc = json.loads(out)
        assert code == 0 and doc["gap"] == 0 and doc["area"] == "6"

    @pytest.mark.parametrize(
        "shape,pts",
        [
            ("triangle", [("A", "0", "0"), ("B", "4", "0"), ("C", "1", "2")]),
            ("parallelogram", SQUARE),
            ("quad", SQUARE),
        ],
    )
    def test_round_trip(self, capsys, tmp_path, shape, pts):
        path = write_points(tmp_path, pts)
        cert_path = tmp_path / "cert.json"
        code, _, err = run(capsys, "--out", cert_path, "approx", shape, path, "--eps", "0.1")
        assert code == 0 and "gap" in err
        assert json.loads(cert_path.read_text())["gap"] < 0.1
        code, out, _ = run(capsys, "verify", cert_path)
        assert code == 0 and json.loads(out) == {"valid": True, "reasons": []}

    def test_plain_pairs_accepted(self, capsys, tmp_path):
        path = tmp_path / "pts.json"
        path.write_text("[[0, 0], [3, 0], [0, 4]]")
        code, out, _ = run(capsys, "approx", "triangle", path, "--eps", "1/10")
        assert code == 0 and json.loads(out)["gap"] == 0

    def test_flagged_exit_code(self, capsys, tmp_path):
        path = write_points(tmp_path, [("A", "0", "0"), ("B", "4", "0"), ("C", "2", "1"), ("D", "2", "4")])
        code, out, _ = run(capsys, "approx", "quad", path, "--eps", "0.2", "--kbudget", 2, "--time-budget", 5)
        doc = json.loads(out)
        assert code == (2 if doc["budget_exhausted"] else 0)
        assert doc["budget_exhausted"] == (not doc["gap"] < 0.2)

    @pytest.mark.parametrize("content", ["not json", "{}", "[[0, 0], [1]]", '[{"label": "A"}]'])
    def test_malformed(self, capsys, tmp_path, content):
        path = tmp_path / "bad.json"
        path.write_text(content)
        code, out, _ = run(capsys, "approx", "triangle", path, "--eps", "0.1")
        assert code == 1 and "error" in json.loads(out)

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "approx", "triangle", tmp_path / "nope.json", "--eps", "0.1")
        assert code == 1

    def test_wrong_shape(self, capsys, tmp_path):
        path = write_points(tmp_path, [("A", 0, 0), ("B", 2, 0), ("C", 3, 1), ("D", 0, 1)])
        code, out, _ = run(capsys, "approx", "parallelogram", path, "--eps", "0.1")
        assert code == 1 and json.loads(out)["error"] == "NotAParallelogram"


def cert_345(**changes):
    doc = {
        "points": [{"label": "A", "x": "0", "y": "0"}, {"label": "B", "x": "3", "y": "0"}, {"label": "C", "x": "0", "y": "4"}],
        "distances": [
            {"from": "A", "to": "B", "value": "3"},
            {"from": "A", "to": "C", "value": "4"},
            {"from": "B", "to": "C", "value": "5"},
        ],
        "area": "6",
    }
    doc.update(changes)
    return doc


class TestVerify:
    def test_valid(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cert_345()))
        code, out, _ = run(capsys, "verify", path)
        assert code == 0 and json.loads(out)["valid"]

    def test_tampered_distance(self, capsys, tmp_path):
        doc = cert_345()
        doc["distances"][2]["value"] = "26/5"
        path = tmp_path / "c.json"
        path.write_text(json.dumps(doc))
        code, out, err = run(capsys, "verify", path)
        result = json.loads(out)
        assert code == 1 and not result["valid"] and result["reasons"] and err

    def test_tampered_area(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cert_345(area="7")))
        code, out, _ = run(capsys, "verify", path)
        assert code == 1 and any("area" in r for r in json.loads(out)["reasons"])


class TestScan:
    def read(self, out):
        return list(csv.DictReader(io.StringIO(out)))

    def test_default_grid(self, capsys):
        code, out, _ = run(capsys, "scan")
        assert code == 0 and len(self.read(out)) == 25

    def test_rows(self, capsys):
        code, out, _ = run(capsys, "scan", "--m-range", "0:2", "--n-range", "-1:2", "--steps", 3)
        rows = {(r["m"], r["n"]): r for r in self.read(out)}
        assert rows[("1", "2")]["singular"] == "0" and rows[("1", "2")]["torsion_order"] == ""
        assert all(r["singular"] == "1" for (m, n), r in rows.items() if n == "-1")

    def test_n_zero_line(self, capsys):
        _, out, _ = run(capsys, "scan", "--m-range", "1:3", "--n-range", "-1:1", "--steps", 3)
        assert all(r["singular"] == "1" for r in self.read(out) if r["n"] == "0")


class TestTransform:
    def test_q2c(self, capsys):
        code, out, _ = run(capsys, "transform", "q2c", "--m", 1, "--n", 2, "--x", 0, "--y", 1)
        doc = json.loads(out)
        assert code == 0 and elliptic.contains(CURVE_1_2, elliptic.CurvePoint.from_json(doc))

    def test_round_trip(self, capsys):
        _, out, _ = run(capsys, "transform", "c2q", "--m", 1, "--n", 2, "--U", "17/4", "--W", "11/8")
        quartic = json.loads(out)
        _, out, _ = run(capsys, "transform", "q2c", "--m", 1, "--n", 2, "--x", quartic["x"], "--y", quartic["y"])
        code, out, _ = run(capsys, "transform", "c2q", "--m", 1, "--n", 2, "--U", json.loads(out)["U"], "--W", json.loads(out)["W"])
        assert code == 0 and json.loads(out) == quartic

    def test_excluded(self, capsys):
        from ratdist import family

        P2 = family.special_points(family.FamilyParams(1, 2))[1]
        code, out, _ = run(capsys, "transform", "c2q", "--m", 1, "--n", 2, "--U", P2.U, "--W", P2.W)
        assert code == 1 and json.loads(out)["error"] == "ExcludedPoint"

    def test_missing_coordinates(self, capsys):
        code, _, _ = run(capsys, "transform", "q2c", "--m", 1, "--n", 2, "--x", 0)
        assert code == 1

    def test_not_on_quartic(self, capsys):
        code, out, _ = run(capsys, "transform", "q2c", "--m", 1, "--n", 2, "--x", 1, "--y", 1)
        assert code == 1 and json.loads(out)["error"] == "NotOnQuartic"


def test_deterministic(capsys, tmp_path):
    path = write_points(tmp_path, SQUARE)
    outputs = [run(capsys, "approx", "quad", path, "--eps", "0.1")[1] for _ in range(2)]
    assert outputs[0] == outputs[1]
    outputs = [run(capsys, "scan", "--steps", 4)[1] for _ in range(2)]
    assert outputs[0] == outputs[1]
