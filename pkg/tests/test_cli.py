import csv
import io
import json
import subprocess
import sys

import pytest

from altmark.cli import EXIT_GUARD, EXIT_INPUT, EXIT_OK, main
from altmark.codec import SCHEMA, Codec, integer_codes, split_tokens


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def lines(text):
    return [json.loads(x) for x in text.splitlines() if x.strip()]


class TestCodec:
    def test_modes(self):
        assert split_tokens("committee") == list("committee")
        assert split_tokens("a b  a\nc") == ["a", "b", "a", "c"]
        assert split_tokens("ab ba", "chars") == ["a", "b", "b", "a"]
        assert split_tokens("ab", "bytes") == [97, 98]
        assert split_tokens("solo", "tokens") == ["solo"]
        with pytest.raises(ValueError):
            split_tokens("x", "nope")

    def test_codec(self):
        c = Codec()
        assert c.encode(["x", "y", "x", "z"]) == [0, 1, 0, 2]
        assert c.decode([2, 0]) == ["z", "x"]
        assert integer_codes(["3", "0"]) == [3, 0]
        assert integer_codes(["a"]) is None
        assert integer_codes(["-1"]) is None


class TestCommands:
    def test_pattern_committee(self, tmp_path):
        f = tmp_path / "committee.txt"
        f.write_text("committee\n")
        code, out, _ = run(["pattern", "--input", str(f)])
        assert code == EXIT_OK
        obj = lines(out)[0]
        assert obj["schema"] == SCHEMA
        assert obj["pattern"] == [1, 2, 3, 3, 4, 5, 5, 6, 6]
        assert obj["alternating_pattern"] == [1, 2, 3, 4, 5, 6]

    def test_pattern_inline_tokens(self):
        code, out, _ = run(["pattern", "--text", "the cat the the dog", "--mode", "tokens"])
        assert lines(out)[0]["alternating_pattern"] == [1, 2, 1, 3]

    def test_partitions(self):
        code, out, _ = run(["partitions", "--n", "4", "--max-part", "2"])
        assert code == 0 and lines(out)[0]["count"] == "3"
        code, out, _ = run(["partitions", "--n", "100"])
        assert lines(out)[0]["count"] == "190569292"

    def test_profile(self):
        code, out, _ = run(["profile", "--pattern", "1,2,3,2,4,2,1"])
        obj = lines(out)[0]
        assert obj["profile"] == [2, 1, 1, 0, 0, 0, 0]
        assert obj["alternating"] and obj["last_multiplicity"] == 2
        code, out, _ = run(["profile", "--pattern", "1,2,3,1"])
        assert lines(out)[0]["L"] == "2"

    def test_enumerate(self):
        code, out, _ = run(["enumerate", "--n", "4"])
        rows = lines(out)
        assert [r["pattern"] for r in rows] == [[1, 2, 1, 2], [1, 2, 1, 3], [1, 2, 3, 1], [1, 2, 3, 2], [1, 2, 3, 4]]
        assert rows[2] == {"schema": SCHEMA, "pattern": [1, 2, 3, 1], "profile": [2, 1, 0, 0], "L": "2"}
        code, out, _ = run(["enumerate", "--n", "4", "--profiles"])
        assert len(lines(out)) == 3

    def test_estimate_block(self):
        code, out, _ = run(["estimate-block", "--n", "4"])
        q = {tuple(r["pattern"]): r["q"] for r in lines(out)}
        assert q[(1, 2, 3, 1)] == "1/8" and q[(1, 2, 3, 4)] == "1/4"

    def test_estimate_seq(self):
        code, out, _ = run(["estimate-seq", "--pattern", "1,2,3,1", "--horizon", "4"])
        obj = lines(out)[0]
        assert [s["conditional"] for s in obj["steps"]] == ["1", "1", "1/2", "1/4"]
        assert obj["prob"] == "1/8" and obj["log2_prob"] == -3.0
        code, out, _ = run(["estimate-seq", "--pattern", "1,2,3,1,4", "--doubling"])
        obj = lines(out)[0]
        assert [s["horizon"] for s in obj["steps"]] == [1, 2, 4, 4, 8]

    def test_simulate_and_recover(self, tmp_path):
        y = tmp_path / "y.txt"
        dist = tmp_path / "d.json"
        dist.write_text(json.dumps({"probs": ["1/5"] * 5}))
        code, out, _ = run(["simulate", "--dist", str(dist), "--N", "20000", "--seed", "7", "--output", str(y)])
        stats = lines(out)[0]
        assert code == 0 and stats["seed"] == 7 and stats["output_length"] > 20000
        assert set(stats) >= {"N", "output_length", "run_count", "expected_runs"}
        code, out, _ = run(["recover", "--input", str(y)])
        rec = lines(out)[0]
        assert code == 0
        assert len(rec["probs"]) == 5
        assert max(abs(p - 0.2) for p in rec["probs"]) < 0.03
        assert rec["n_alternating"] == stats["run_count"]

    def test_recover_word_tokens(self, tmp_path):
        f = tmp_path / "w.txt"
        f.write_text("red red blue green green blue red green blue blue red")
        code, out, _ = run(["recover", "--input", str(f), "--anchor", "red,blue"])
        obj = lines(out)[0]
        assert code == 0 and obj["symbols"] == ["red", "blue", "green"] and obj["anchor"] == ["red", "blue"]

    def test_seed_emitted_when_missing(self):
        code, out, _ = run(["simulate", "--dist", "uniform:3", "--N", "10"])
        seed = lines(out)[0]["seed"]
        code, again, _ = run(["simulate", "--dist", "uniform:3", "--N", "10", "--seed", str(seed)])
        assert lines(again)[0] == lines(out)[0]

    def test_concentration(self):
        code, out, _ = run(["concentration", "--N", "500", "--trials", "50", "--seed", "1", "--jobs", "2"])
        obj = lines(out)[0]
        assert code == 0 and obj["hits"] == 0 and obj["seed"] == 1
        code, out2, _ = run(["--jobs", "1", "concentration", "--N", "500", "--trials", "50", "--seed", "1"])
        assert lines(out2)[0] == obj

    def test_redundancy_csv(self):
        code, out, _ = run(["redundancy", "--n-max", "4"])
        assert out.startswith(f"# schema: {SCHEMA}\n")
        rows = list(csv.DictReader(x for x in out.splitlines() if not x.startswith("#")))
        row4 = rows[3]
        assert (row4["n"], row4["n_alt_patterns"], row4["n_alt_profiles"], row4["p_n"], row4["Z_n"]) == (
            "4", "5", "3", "5", "4"
        )

    def test_redundancy_json(self):
        code, out, _ = run(["redundancy", "--n-max", "3", "--format", "json"])
        objs = lines(out)
        assert objs[0]["kind"] == "meta"
        assert [o["n"] for o in objs[1:]] == [1, 2, 3]

    def test_deterministic_output(self):
        argv = ["simulate", "--dist", "uniform:4", "--N", "100", "--seed", "3"]
        assert run(argv)[1] == run(argv)[1]


class TestErrors:
    def test_guard_exit(self, monkeypatch):
        code, _, err = run(["enumerate", "--n", "21"])
        assert code == EXIT_GUARD and "ALT_MARK_GUARD_N" in err
        monkeypatch.setenv("ALT_MARK_GUARD_N", "3")
        assert run(["estimate-block", "--n", "4"])[0] == EXIT_GUARD
        assert run(["redundancy", "--n-max", "4"])[0] == EXIT_GUARD

    def test_exact_guard_default(self):
        assert run(["redundancy", "--n-max", "13"])[0] == EXIT_GUARD

    def test_input_errors(self, tmp_path):
        assert run(["pattern", "--input", str(tmp_path / "missing")])[0] == EXIT_INPUT
        assert run(["estimate-seq", "--pattern", "1,1,2"])[0] == EXIT_INPUT
        assert run(["estimate-seq", "--pattern", "1,x"])[0] == EXIT_INPUT
        assert run(["profile", "--pattern", "2,1"])[0] == EXIT_INPUT
        assert run(["simulate", "--dist", "1/2,1/3", "--N", "3"])[0] == EXIT_INPUT
        assert run(["simulate", "--dist", "uniform:2", "--N", "3", "--channel", "bogus"])[0] == EXIT_INPUT
        f = tmp_path / "one.txt"
        f.write_text("a a a")
        assert run(["recover", "--input", str(f)])[0] == EXIT_INPUT

    def test_usage_errors(self, capsys):
        assert run(["frobnicate"])[0] == EXIT_INPUT
        assert run(["partitions", "--n", "4", "--bogus"])[0] == EXIT_INPUT
        assert run(["partitions"])[0] == EXIT_INPUT

    @pytest.mark.parametrize(
        "cmd",
        ["pattern", "profile", "partitions", "enumerate", "estimate-block", "estimate-seq",
         "simulate", "recover", "redundancy", "concentration"],
    )
    def test_help(self, cmd, capsys):
        assert main([cmd, "--help"]) == 0
        assert capsys.readouterr().out.startswith(f"usage: altmark {cmd}")


def test_console_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "altmark", "partitions", "--n", "7"], capture_output=True, text=True
    )
    assert out.returncode == 0 and json.loads(out.stdout)["count"] == "15"
