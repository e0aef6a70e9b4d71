import io
import json
import subprocess
import sys

from substrat_bridge.server import serve


def exchange(lines):
    stdin = io.StringIO("".join(
        json.dumps(x) + "\n" if isinstance(x, dict) else x for x in lines))
    stdout = io.StringIO()
    serve(stdin, stdout)
    return [json.loads(l) for l in stdout.getvalue().splitlines()]


class TestServeLoop:
    def test_malformed_json(self):
        out = exchange(["{broken\n", {"op": "shutdown"}])
        assert out[0] == {"ok": False, "error": "protocol"}
        assert out[1] == {"ok": True}

    def test_non_object_line(self):
        out = exchange(["[1, 2, 3]\n", {"op": "shutdown"}])
        assert out[0] == {"ok": False, "error": "protocol"}

    def test_unknown_op(self):
        out = exchange([{"op": "train"}, {"op": "shutdown"}])
        assert out[0] == {"ok": False, "error": "protocol"}

    def test_missing_fields(self):
        out = exchange([{"op": "fit"}, {"op": "shutdown"}])
        assert out[0] == {"ok": False, "error": "protocol"}

    def test_handler_exception_becomes_error(self, tmp_path):
        out = exchange([
            {"op": "fit", "data_path": str(tmp_path / "gone.csv"),
             "target": "churned", "time_budget_s": 1, "eval_budget": 1,
             "restrict_family": None, "seed": 0},
            {"op": "shutdown"},
        ])
        assert out[0]["ok"] is False
        assert out[1] == {"ok": True}

    def test_eof_terminates(self):
        out = exchange([])
        assert out == []

    def test_blank_lines_skipped(self):
        out = exchange(["\n", "\n", {"op": "shutdown"}])
        assert out == [{"ok": True}]


class TestEveryResponseIsValidSchema:
    REQUIRED = {
        "fit": {"model_family", "config_blob", "accuracy", "wall_time_s"},
        "score": {"accuracy", "wall_time_s"},
    }

    def test_fit_and_score_fields(self, fixture_csv):
        out = exchange([
            {"op": "fit", "data_path": fixture_csv, "target": "churned",
             "time_budget_s": 10, "eval_budget": 3, "restrict_family": None,
             "seed": 0},
            {"op": "shutdown"},
        ])
        fit_resp = out[0]
        assert fit_resp["ok"] is True
        assert self.REQUIRED["fit"] <= fit_resp.keys()
        assert 0.0 <= fit_resp["accuracy"] <= 1.0

        out = exchange([
            {"op": "score", "data_path": fixture_csv, "target": "churned",
             "model_family": fit_resp["model_family"],
             "config_blob": fit_resp["config_blob"], "seed": 0},
            {"op": "shutdown"},
        ])
        assert out[0]["ok"] is True
        assert self.REQUIRED["score"] <= out[0].keys()


class TestSubprocess:
    def test_end_to_end_over_pipes(self, fixture_csv):
        proc = subprocess.Popen([sys.executable, "-m", "substrat_bridge"],
                                stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                text=True, bufsize=1)
        try:
            req = {"op": "fit", "data_path": fixture_csv, "target": "churned",
                   "time_budget_s": 30, "eval_budget": 3,
                   "restrict_family": "knn", "seed": 4}
            proc.stdin.write(json.dumps(req) + "\n")
            proc.stdin.flush()
            resp = json.loads(proc.stdout.readline())
            assert resp["ok"] is True
            assert resp["model_family"] == "knn"
            proc.stdin.write(json.dumps({"op": "shutdown"}) + "\n")
            proc.stdin.flush()
            assert json.loads(proc.stdout.readline()) == {"ok": True}
            assert proc.wait(timeout=10) == 0
        finally:
            proc.kill()
