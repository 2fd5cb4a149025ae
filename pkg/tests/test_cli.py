import numpy as np

from bbbc.cli import main
from bbbc.datasets import save_csv, synthetic_blobs

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

FAST = ["--runs", "2", "--iters", "8", "--stars", "12", "--seed", "5"]


def _bench(out, *extra):
    return main(
        ["bench", "--function", "sphere", "--dim", "2", *FAST, "--out", str(out), *extra]
    )


def test_bench_and_verify_roundtrip(tmp_path, capsys):
    out = tmp_path / "bench"
    assert _bench(out, "--no-plot") == 0
    assert (out / "results.csv").exists()
    assert main(["verify", str(out)]) == 0
    assert "verify OK" in capsys.readouterr().out


def test_unknown_function_is_usage_error(tmp_path):
    code = main(
        ["bench", "--function", "nope", *FAST, "--out", str(tmp_path / "x")]
    )
    assert code == 2


def test_bad_metric_is_usage_error(tmp_path, iris_path):
    code = main(
        ["cluster", "--dataset", str(iris_path), "--k", "3", "--metric", "manhattan",
         *FAST, "--out", str(tmp_path / "x")]
    )
    assert code == 2


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("occupied")
    code = _bench(blocker / "nested", "--no-plot")
    assert code == 4


def test_missing_dataset_is_io_error(tmp_path):
    code = main(
        ["cluster", "--dataset", str(tmp_path / "absent.csv"), "--k", "2",
         *FAST, "--out", str(tmp_path / "x")]
    )
    assert code == 4


def test_malformed_dataset_is_data_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,oops\n", encoding="utf-8")
    code = main(
        ["cluster", "--dataset", str(bad), "--k", "1", *FAST,
         "--out", str(tmp_path / "x")]
    )
    assert code == 3


def test_cluster_compare_and_plot(tmp_path, capsys):
    ds = synthetic_blobs(
        2, 10, 2, np.array([[0.0, 0.0], [6.0, 6.0]]), spread=0.2, seed=1
    )
    data_path = tmp_path / "blobs.csv"
    save_csv(ds, data_path)

    out = tmp_path / "cluster"
    code = main(
        ["cluster", "--dataset", str(data_path), "--k", "2", "--label-column", "-1",
         "--algorithms", "mebbbc,kmeans", "--metric", "sq", *FAST, "--out", str(out)]
    )
    assert code == 0
    assert (out / "best_model.csv").exists()
    assert (out / "fig_convergence_blobs_k2.png").read_bytes()[:8] == PNG_MAGIC

    cmp_dir = tmp_path / "cmp"
    code = main(
        ["compare", str(out / "results.csv"), str(out / "results.csv"),
         "--out", str(cmp_dir)]
    )
    assert code == 0
    captured = capsys.readouterr().out
    assert "p = 1" in captured
    assert (cmp_dir / "significance.csv").exists()

    # re-render figures from the written directory alone
    for figure in out.glob("fig_*.png"):
        figure.unlink()
    assert main(["plot", str(out)]) == 0
    assert (out / "fig_convergence_blobs_k2.png").exists()


def test_verify_detects_corruption_via_cli(tmp_path, capsys):
    out = tmp_path / "bench"
    assert _bench(out, "--no-plot") == 0
    summary = (out / "summary.csv").read_text().splitlines()
    parts = summary[1].split(",")
    parts[3] = "999.0"
    summary[1] = ",".join(parts)
    (out / "summary.csv").write_text("\n".join(summary) + "\n")
    assert main(["verify", str(out)]) == 3
    assert "FAIL" in capsys.readouterr().err
