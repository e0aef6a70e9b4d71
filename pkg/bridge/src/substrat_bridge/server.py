"""Adapter protocol server: one JSON object per stdin line, one JSON object
per stdout line. Never crashes on malformed input; any handler exception
becomes an error response."""
from __future__ import annotations

import json
import sys

from substrat_bridge import backend


def handle(req: dict) -> dict:
    op = req.get("op")
    if op == "fit":
        out = backend.fit(req["data_path"], req["target"],
                          time_budget_s=req.get("time_budget_s") or 60.0,
                          eval_budget=req.get("eval_budget"),
                          restrict_family=req.get("restrict_family"),
                          seed=int(req.get("seed") or 0))
        return {"ok": True, **out}
    if op == "score":
        out = backend.score(req["data_path"], req["target"],
                            model_family=req["model_family"],
                            config_blob=req["config_blob"],
                            seed=int(req.get("seed") or 0))
        return {"ok": True, **out}
    return {"ok": False, "error": "protocol"}


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def reply(obj):
        stdout.write(json.dumps(obj, sort_keys=True) + "\n")
        stdout.flush()

    for line in stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
            if not isinstance(req, dict):
                raise ValueError
        except ValueError:
            reply({"ok": False, "error": "protocol"})
            continue
        if req.get("op") == "shutdown":
            reply({"ok": True})
            return
        try:
            reply(handle(req))
        except KeyError:
            reply({"ok": False, "error": "protocol"})
        except Exception as exc:
            reply({"ok": False, "error": str(exc)})


def main() -> int:
    serve()
    return 0


if __name__ == "__main__":
    sys.exit(main())
