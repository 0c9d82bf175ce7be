import csv
import json
from pathlib import Path

import numpy as np
import pytest

from wmcs import Dataset, Lognormal, WeightedFamily, length_biased
from wmcs.cli import ingest, main
from wmcs.harness import example2_truth


@pytest.fixture
def lb_data_file(tmp_path):
    rng = np.random.default_rng(7)
    x = WeightedFamily(Lognormal(2.0, 0.5), length_biased()).sample(200, rng)
    path = tmp_path / "data.txt"
    path.write_text("# simulated draws\n" + "\n".join(f"{v:.10g}" for v in x) + "\n")
    return path


@pytest.fixture
def bimodal_data_file(tmp_path):
    rng = np.random.default_rng(0)
    x = example2_truth().sample(1000, rng)
    path = tmp_path / "bimodal.txt"
    path.write_text("\n".join(f"{v:.10g}" for v in x) + "\n")
    return path


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload))
    return path


LB_MODELS = [
    {"family": "lognormal", "weight": {"kind": "length_biased"}},
    {"family": "gamma", "weight": {"kind": "length_biased"}},
    {"family": "weibull", "weight": {"kind": "length_biased"}},
]
EQ5_REFERENCE = {
    "family": "laplace_logistic_mixture",
    "params": {"weight": 1 / 3, "laplace_loc": -4.0, "laplace_scale": 0.5,
               "logistic_loc": 6.0, "logistic_scale": 1.0},
}


class TestIngest:
    def test_plain_numbers(self, tmp_path):
        path = tmp_path / "plain.txt"
        path.write_text("1.0\n2.0\n3.0\n")
        data = ingest(path)
        np.testing.assert_array_equal(data.values, [1.0, 2.0, 3.0])

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("# header\n1.5\n\n# note\n2.5\n")
        assert ingest(path).n == 2

    def test_csv_column(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("x,y\n1,9\n2,8\n")
        np.testing.assert_array_equal(ingest(path, column="x").values, [1.0, 2.0])
        with pytest.raises(ValueError, match="no column named"):
            ingest(path, column="z")

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1.0\n2.0\nabc\n4.0\n")
        with pytest.raises(ValueError, match="line 3"):
            ingest(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# nothing\n")
        with pytest.raises(ValueError, match="no data"):
            ingest(path)


class TestCommands:
    def test_fit(self, lb_data_file, tmp_path, capsys):
        models = write_json(tmp_path / "models.json", LB_MODELS[:1])
        code = main(["fit", "--input", str(lb_data_file), "--models", str(models)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n"] == 200
        fit = payload["fits"][0]
        assert fit["model"] == "length_biased_lognormal"
        assert fit["theta_hat"]["mu"] == pytest.approx(2.0, abs=0.3)

    def test_mcs_json_and_csv(self, lb_data_file, tmp_path):
        models = write_json(tmp_path / "models.json", LB_MODELS)
        out_json = tmp_path / "mcs.json"
        code = main(["mcs", "--input", str(lb_data_file), "--models", str(models),
                     "--alpha", "0.05", "--output", str(out_json)])
        assert code == 0
        payload = json.loads(out_json.read_text())
        assert "length_biased_lognormal" in payload["members"]
        out_csv = tmp_path / "mcs.csv"
        code = main(["mcs", "--input", str(lb_data_file), "--models", str(models),
                     "--format", "csv", "--output", str(out_csv)])
        assert code == 0
        rows = list(csv.DictReader(out_csv.read_text().splitlines()))
        assert rows[0]["hypothesis"] == "length_biased_lognormal"
        assert rows[0]["conclusion"] in ("accepted", "rejected")

    def test_local_mcs(self, bimodal_data_file, tmp_path):
        models = write_json(
            tmp_path / "left.json",
            [{"family": n} for n in ("normal", "cauchy", "logistic", "laplace")],
        )
        out = tmp_path / "local.json"
        code = main(["local-mcs", "--input", str(bimodal_data_file), "--models", str(models),
                     "--alpha", "0.025", "--region=-inf,0", "--output", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["region"] == [float("-inf"), 0.0]
        assert any("logistic" in m for m in payload["members"])

    def test_mixture_and_distances_round_trip(self, bimodal_data_file, tmp_path):
        left = write_json(tmp_path / "left.json",
                          [{"family": n} for n in ("normal", "cauchy", "logistic", "laplace")])
        right = write_json(tmp_path / "right.json",
                           [{"family": n} for n in ("gamma", "weibull", "lognormal")])
        ref = write_json(tmp_path / "ref.json", EQ5_REFERENCE)
        out = tmp_path / "mixture.json"
        code = main(["mixture-mcs", "--input", str(bimodal_data_file),
                     "--left-models", str(left), "--right-models", str(right),
                     "--partition", "0", "--alpha", "0.05", "--beta", "0.025",
                     "--reference", str(ref), "--output", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["beta"] == 0.025
        assert len(payload["candidates"]) >= 1

        table = tmp_path / "distances.csv"
        plot = tmp_path / "plot.csv"
        code = main(["distances", "--candidates", str(out), "--reference", str(ref),
                     "--kl", "--output", str(table), "--plot", str(plot),
                     "--plot-target", "0", "--grid", "-10", "12"])
        assert code == 0
        rows = list(csv.DictReader(table.read_text().splitlines()))
        for row, cand in zip(rows, payload["candidates"]):
            # the distances command reproduces the stored diagnostics
            assert float(row["hellinger_sq"]) == pytest.approx(cand["hellinger_sq"], abs=5e-4)
            assert float(row["l2_sq"]) == pytest.approx(cand["l2_sq"], abs=5e-4)
            assert float(row["kl"]) >= 0.0
        plot_rows = plot.read_text().splitlines()
        assert plot_rows[0] == "x,density"
        assert len(plot_rows) == 402

    def test_simulate_smoke(self, tmp_path):
        out_dir = tmp_path / "sim"
        code = main(["simulate", "--experiment", "example1", "--seed", "7",
                     "--replications", "2", "--sample-sizes", "50",
                     "--output-dir", str(out_dir)])
        assert code == 0
        assert (out_dir / "table1.csv").exists()
        assert (out_dir / "table2.csv").exists()

    def test_seed_determines_outputs(self, tmp_path):
        dirs = [tmp_path / "s1", tmp_path / "s2"]
        for d in dirs:
            code = main(["simulate", "--experiment", "example1", "--seed", "9",
                         "--replications", "2", "--sample-sizes", "50",
                         "--output-dir", str(d)])
            assert code == 0
        assert (dirs[0] / "table1.csv").read_bytes() == (dirs[1] / "table1.csv").read_bytes()


class TestExitCodes:
    def test_missing_file_is_usage_error(self, tmp_path):
        models = write_json(tmp_path / "m.json", LB_MODELS)
        code = main(["mcs", "--input", str(tmp_path / "absent.txt"),
                     "--models", str(models)])
        assert code == 2

    def test_parse_error_is_usage_error(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1.0\nxyz\n")
        models = write_json(tmp_path / "m.json", LB_MODELS)
        code = main(["mcs", "--input", str(path), "--models", str(models)])
        assert code == 2

    def test_degeneracy_is_exit_one(self, tmp_path, capsys):
        path = tmp_path / "tiny.txt"
        path.write_text("1.0\n2.0\n")
        models = write_json(tmp_path / "m.json", LB_MODELS)
        code = main(["mcs", "--input", str(path), "--models", str(models)])
        assert code == 1
        assert "error" in capsys.readouterr().err
