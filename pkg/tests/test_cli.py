import json
import subprocess
import sys

import pytest

from thinlab.bits import Word
from thinlab.cli import EXIT_BUDGET, EXIT_CONTRACT, EXIT_FILE, main
from thinlab.game import Side, Strategy, save_corpus


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_code_analyze_words(capsys):
    report = run_json(capsys, "code", "analyze", "--words", "000,111")
    assert report["schema"] == "thinlab/1"
    assert report["min_distance"] == 3
    assert report["detects_up_to"] == 2
    assert report["corrects_up_to"] == 1
    assert report["thin"] is True


def test_code_analyze_stream_file(capsys, tmp_path):
    path = tmp_path / "streams.json"
    path.write_text(json.dumps({
        "streams": [
            {"kind": "constant", "prefix": "", "tail": "0"},
            {"kind": "periodic", "prefix": "", "period": "01"},
        ]
    }))
    report = run_json(capsys, "code", "analyze", "--streams", str(path))
    assert report["min_distance"] == "omega"
    assert report["detects_up_to"] == "omega"
    assert report["thin_equivalence"]["class_count"] == 2


def test_code_decode(capsys, tmp_path):
    path = tmp_path / "code.txt"
    path.write_text("000\n111\n")
    report = run_json(capsys, "code", "decode", "--code", str(path),
                      "--received", "100", "--received", "110")
    results = [d["result"] for d in report["decodes"]]
    assert results[0] == {"status": "corrected", "word": "000", "errors": 1}
    assert results[1]["word"] == "111"


def test_code_maximalize(capsys, tmp_path):
    save = tmp_path / "grown.txt"
    report = run_json(capsys, "code", "maximalize", "--words", "000",
                      "--save", str(save))
    assert report["output"]["words"] == ["000", "011", "101", "110"]
    assert save.read_text() == "000\n011\n101\n110\n"


def test_game_play(capsys):
    report = run_json(capsys, "game", "play", "--ego", "const:0",
                      "--alter", "const:1", "--rounds", "3")
    assert report["transcript"]["outcome"] == "01010"


def test_capture_ego_seeded(capsys):
    report = run_json(capsys, "capture", "ego", "--seed", "3", "--count", "5",
                      "--rounds", "6")
    assert report["all_pass"] is True
    assert len(report["strategies"]) == 5
    assert all(r["prefix_hd"] == 1 for r in report["strategies"])


def test_capture_alter_with_corpus_file_and_trace(capsys, tmp_path):
    corpus = tmp_path / "corpus.json"
    strategies = [
        Strategy.from_table(Side.ALTER, {}, fallback=Word.from_string("01"),
                            name="steady"),
        Strategy.from_table(Side.ALTER, {}, fallback=Word.from_string("1"),
                            name="ones"),
    ]
    save_corpus(strategies, corpus)
    trace_path = tmp_path / "trace.json"
    report = run_json(capsys, "capture", "alter", "--strategy", str(corpus),
                      "--plays", "2", "--sweeps", "5",
                      "--check-theta", "12", "--trace-out", str(trace_path))
    assert report["all_pass"] is True
    assert {r["name"] for r in report["strategies"]} == {"steady", "ones"}
    traces = json.loads(trace_path.read_text())["traces"]
    first = traces["steady"][0]
    assert first == {"play": 0, "side": "ego", "word": "0", "reply_id": None}
    reply_ids = [t["reply_id"] for t in traces["steady"] if t["side"] == "alter"]
    assert reply_ids == list(range(1, len(reply_ids) + 1))


def test_xor_partition(capsys):
    report = run_json(capsys, "xor", "partition", "--n", "3")
    assert report["sizes"] == [4, 4]
    assert report["checks"]["holds"] is True
    assert report["t0"] == ["000", "011", "101", "110"]


def test_xor_verify_files(capsys, tmp_path):
    t0 = tmp_path / "t0.txt"
    t1 = tmp_path / "t1.txt"
    t0.write_text("00\n11\n")
    t1.write_text("01\n10\n")
    report = run_json(capsys, "xor", "verify", "--t0", str(t0), "--t1", str(t1))
    assert report["checks"]["holds"] is True


def test_qtable_with_witnesses_and_csv(capsys, tmp_path):
    csv = tmp_path / "q.csv"
    report = run_json(capsys, "qtable", "--n-max", "3", "--k-max", "3",
                      "--witnesses", "--csv", str(csv))
    rows = {(r["n"], r["k"]): r for r in report["rows"]}
    assert rows[(2, 2)]["exact"] == 2
    assert rows[(3, 3)]["exact"] == 4
    assert rows[(3, 3)]["lower_bound_ball"] == 4
    assert rows[(3, 3)]["lower_bound_binomial"] == 3
    assert len(rows[(3, 3)]["witness"]) == 4
    lines = csv.read_text().splitlines()
    assert lines[0] == "n,k,lower_bound_ball,lower_bound_binomial,exact_or_interval"
    assert "3,3,4,3,4" in lines


def test_qtable_budget_interval(capsys):
    report = run_json(capsys, "qtable", "--n-max", "6", "--k-max", "3",
                      "--budget-n-k3", "5")
    row = next(r for r in report["rows"] if (r["n"], r["k"]) == (6, 3))
    assert row["flagged"] is True
    assert "interval" in row and len(row["interval"]) == 2


def test_golden_stability_same_config_same_bytes(capsys):
    argv = ["capture", "alter", "--seed", "11", "--count", "4",
            "--plays", "3", "--sweeps", "6", "--check-theta", "10"]
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_out_flag_writes_file(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, stdout, _ = run_cli(capsys, "code", "analyze", "--words", "00,11",
                              "--out", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["min_distance"] == 2


def test_plots_written(capsys, tmp_path):
    plots = tmp_path / "figs"
    report = run_json(capsys, "qtable", "--n-max", "3", "--k-max", "3",
                      "--plots", str(plots))
    assert report["figures"] == ["qtable.png"]
    assert (plots / "qtable.png").stat().st_size > 0
    report = run_json(capsys, "code", "analyze", "--words", "0000,1111,0011",
                      "--plots", str(plots))
    assert (plots / "distance_histogram.png").stat().st_size > 0
    report = run_json(capsys, "capture", "ego", "--seed", "1", "--count", "1",
                      "--rounds", "4", "--plots", str(plots))
    assert (plots / "capture_ego.png").stat().st_size > 0
    report = run_json(capsys, "capture", "alter", "--seed", "1", "--count", "1",
                      "--plays", "2", "--sweeps", "4", "--check-theta", "8",
                      "--plots", str(plots))
    assert (plots / "capture_alter.png").stat().st_size > 0
    report = run_json(capsys, "xor", "partition", "--n", "4",
                      "--plots", str(plots))
    assert (plots / "partition_weights.png").stat().st_size > 0


def test_exit_codes(capsys, tmp_path):
    code, _, err = run_cli(capsys, "code", "analyze", "--code", "/nonexistent")
    assert code == EXIT_FILE
    assert json.loads(err)["error"]["exit_code"] == EXIT_FILE

    code, _, err = run_cli(capsys, "qtable", "--n-max", "13", "--k-max", "3")
    assert code == EXIT_BUDGET
    assert "budget" in json.loads(err)["error"]["message"]

    code, _, err = run_cli(capsys, "code", "analyze", "--words", "000")
    assert code == EXIT_CONTRACT

    bad = tmp_path / "bad.txt"
    bad.write_text("01\n011\n")
    code, _, err = run_cli(capsys, "code", "analyze", "--code", str(bad))
    assert code == EXIT_CONTRACT

    with pytest.raises(SystemExit) as exc:
        main(["code", "analyze", "--no-such-flag"])
    assert exc.value.code == 2


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "code", "analyze", "--words", "000,111",
                           "--format", "text")
    assert code == 0
    assert "min_distance: 3" in out
    assert "{" not in out


def test_installed_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "thinlab", "xor", "partition", "--n", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sizes"] == [2, 2]
