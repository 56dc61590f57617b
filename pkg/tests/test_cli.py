import json
import math
import os

import pytest

from xxz_deficit.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestPoint:
    @pytest.mark.parametrize(
        "jz,b,t,branch",
        [
            (-1.0, 1.4, 0.72, "Interior"),
            (1.5, 1.0, 0.5, "Zero"),
            (-1.0, 1.4, 0.4, "HalfPi"),
        ],
    )
    def test_branch_examples(self, capsys, jz, b, t, branch):
        rc, out, _ = run(
            capsys, "point", "--J", "-1" if jz < 0 else "1", "--Jz", str(jz),
            "--B", str(b), "--T", str(t),
        )
        assert rc == 0
        assert f"branch,{branch}" in out

    def test_reports_both_units(self, capsys):
        rc, out, _ = run(capsys, "point", "--J", "-1", "--Jz", "-1",
                         "--B", "1.4", "--T", "0.72")
        assert rc == 0
        rows = dict(line.split(",", 1) for line in out.strip().split("\n"))
        assert float(rows["deficit_bits"]) == pytest.approx(
            float(rows["deficit_nats"]) / math.log(2.0), rel=1e-6
        )

    def test_json_format(self, capsys):
        rc, out, _ = run(capsys, "point", "--J", "-1", "--Jz", "-1",
                         "--B", "1.4", "--T", "0.72", "--format", "json")
        assert rc == 0
        doc = json.loads(out)
        assert doc["branch"] == "Interior"

    def test_missing_point_is_usage_error(self, capsys):
        rc, _, err = run(capsys, "point", "--J", "-1", "--Jz", "-1")
        assert rc == 1
        assert "required" in err


class TestProfile:
    def test_shape_annotation_and_samples(self, capsys):
        rc, out, _ = run(capsys, "profile", "--J", "-1", "--Jz", "-1.5",
                         "--B", "1.9", "--T", "0.628", "--n", "201")
        assert rc == 0
        assert "# shape=Bimodal" in out
        assert "# interior_min," in out and "# interior_max," in out
        data_lines = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert len(data_lines) == 1 + 201

    def test_flat_curvature_at_the_bifurcation_point(self, capsys):
        rc, out, _ = run(capsys, "profile", "--J", "-1", "--Jz", "-1",
                         "--B", "1.4", "--T", "0.742967", "--extended")
        assert rc == 0
        rows = [l.split(",") for l in out.strip().split("\n") if not l.startswith("#")]
        samples = [(float(a), float(b)) for a, b in rows[1:]]
        thetas = [t for t, _ in samples]
        values = [v for _, v in samples]
        assert thetas[0] == pytest.approx(-math.pi / 2)
        # quartic-flat minimum at the center: discrete curvature nearly zero
        k = min(range(len(thetas)), key=lambda i: abs(thetas[i]))
        h = thetas[k + 1] - thetas[k]
        curv = (values[k + 1] - 2 * values[k] + values[k - 1]) / h**2
        assert abs(curv) < 1e-3

    def test_endpoint_slopes_vanish(self, capsys):
        rc, out, _ = run(capsys, "profile", "--J", "-1", "--Jz", "-1",
                         "--B", "1.4", "--T", "0.9")
        rows = [l.split(",") for l in out.strip().split("\n") if not l.startswith("#")]
        samples = [(float(a), float(b)) for a, b in rows[1:]]
        h = samples[1][0] - samples[0][0]
        assert abs(samples[1][1] - samples[0][1]) / h < 0.05
        assert abs(samples[-1][1] - samples[-2][1]) / h < 0.05


class TestBoundary:
    def test_trace_to_file(self, capsys, tmp_path):
        out_path = tmp_path / "curve.csv"
        rc, _, _ = run(capsys, "boundary", "--J", "-1", "--Jz", "-1",
                       "--kind", "zero", "--march", "B",
                       "--B-range", "1.4:1.2:0.05", "--out", str(out_path))
        assert rc == 0
        lines = out_path.read_text().strip().split("\n")
        assert lines[1] == "kind,T,B,residual,is_physical"
        assert len(lines) == 2 + 5

    def test_partial_trace_exits_two(self, capsys):
        rc, out, _ = run(capsys, "boundary", "--J", "-1", "--Jz", "-1.5",
                         "--kind", "zeroprime", "--march", "B",
                         "--B-range", "2.0:1.5:0.02",
                         "--bracket-lo", "0.55", "--bracket-hi", "0.75",
                         "--no-classify")
        assert rc == 2
        assert "complete=0" in out

    def test_missing_range_is_usage_error(self, capsys):
        rc, _, err = run(capsys, "boundary", "--J", "-1", "--Jz", "-1",
                         "--kind", "zero")
        assert rc == 1


class TestTriple:
    def test_ising_like_triple_point(self, capsys):
        rc, out, _ = run(capsys, "triple", "--J", "-1", "--Jz", "-1.5",
                         "--B-range", "1.4:2.0:0.02",
                         "--bracket-lo", "0.4", "--bracket-hi", "0.9")
        assert rc == 0
        t, b = out.strip().split("\n")[1].split(",")[:2]
        assert float(t) == pytest.approx(0.6454108, abs=1e-3)
        assert float(b) == pytest.approx(1.6851637, abs=1e-3)

    def test_no_intersection_exits_two(self, capsys):
        rc, _, err = run(capsys, "triple", "--J", "-1", "--Jz", "-1",
                         "--B-range", "1.3:1.5:0.05",
                         "--kinds", "zero,halfpi",
                         "--bracket-lo", "0.4", "--bracket-hi", "0.9")
        assert rc == 2


class TestJumps:
    def test_reproduces_one_table_row(self, capsys):
        rc, out, _ = run(capsys, "jumps", "--J", "-1", "--Jz", "-1.5",
                         "--B-list", "1.9", "--bracket-lo", "0.4",
                         "--bracket-hi", "0.9")
        assert rc == 0
        row = out.strip().split("\n")[-1].split(",")
        assert float(row[1]) == pytest.approx(0.63329, abs=1e-3)
        assert float(row[2]) == pytest.approx(0.64026, abs=2e-3)

    def test_failed_field_value_exits_two(self, capsys):
        rc, out, _ = run(capsys, "jumps", "--J", "1", "--Jz", "1.5",
                         "--B-list", "1.0")
        assert rc == 2


class TestDiagram:
    def test_deterministic_across_worker_counts(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["diagram", "--J", "-1", "--Jz", "-1", "--T-range", "0.2:1.0",
                "--B-range", "0.2:2.0", "--grid", "10x8"]
        rc1, _, _ = run(capsys, *base, "--workers", "1", "--out", str(a))
        rc2, _, _ = run(capsys, *base, "--workers", "2", "--out", str(b))
        assert rc1 == rc2 == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_output(self, capsys, tmp_path):
        path = tmp_path / "d.json"
        rc, _, _ = run(capsys, "diagram", "--J", "1", "--Jz", "0",
                       "--T-range", "0.2:0.6", "--B-range", "0.4:0.8",
                       "--grid", "3x3", "--format", "json", "--out", str(path))
        assert rc == 0
        doc = json.loads(path.read_text())
        assert len(doc["cells"]) == 9

    def test_levels_written_alongside(self, capsys, tmp_path):
        path = tmp_path / "d.csv"
        rc, _, _ = run(capsys, "diagram", "--J", "-1", "--Jz", "-1",
                       "--T-range", "0.1:1.0", "--B-range", "0.1:1.5",
                       "--grid", "12x12", "--levels", "0.3",
                       "--out", str(path))
        assert rc == 0
        assert (tmp_path / "d.csv.levels.csv").exists()

    def test_bad_grid_leaves_no_partial_file(self, capsys, tmp_path):
        path = tmp_path / "never.csv"
        rc, _, err = run(capsys, "diagram", "--J", "-1", "--Jz", "-1",
                         "--T-range", "0.2:1.0", "--B-range", "0.2:2.0",
                         "--grid", "bogus", "--out", str(path))
        assert rc == 1
        assert not path.exists()

    def test_usage_error_on_zero_normalizer(self, capsys):
        rc, _, err = run(capsys, "diagram", "--J", "0", "--Jz", "-1",
                         "--T-range", "0.2:1.0", "--B-range", "0.2:2.0",
                         "--grid", "4x4", "--norm", "J")
        assert rc == 1
        assert "normalize" in err
