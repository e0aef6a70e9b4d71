#!/usr/bin/env python3
"""Record the golden protocol transcript.

Sends a scripted exchange (unrestricted fit, restricted fit, score of the
first fit's model, shutdown) to the server and stores both sides:
requests.jsonl uses the @DATA@ path placeholder and @blob:N@ to reference an
earlier response's config_blob; responses.jsonl is the byte-exact golden.

Re-run after any backend or dependency change, then commit both files.
"""
import io
import json
import os

from substrat_bridge.server import serve

HERE = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(HERE, os.pardir, "tests", "data")
FIXTURE = os.path.join(DATA_DIR, "reviews.csv")

REQUEST_TEMPLATES = [
    {"op": "fit", "data_path": "@DATA@", "target": "churned",
     "time_budget_s": 30.0, "eval_budget": 6, "restrict_family": None,
     "seed": 20},
    {"op": "fit", "data_path": "@DATA@", "target": "churned",
     "time_budget_s": 30.0, "eval_budget": 3,
     "restrict_family": "decision_tree", "seed": 21},
    {"op": "score", "data_path": "@DATA@", "target": "churned",
     "model_family": "@family:0@", "config_blob": "@blob:0@", "seed": 20},
    {"op": "shutdown"},
]


def resolve(template: dict, responses: list[dict], data_path: str) -> dict:
    req = dict(template)
    for key, value in req.items():
        if value == "@DATA@":
            req[key] = data_path
        elif isinstance(value, str) and value.startswith("@blob:"):
            req[key] = responses[int(value[6:-1])]["config_blob"]
        elif isinstance(value, str) and value.startswith("@family:"):
            req[key] = responses[int(value[8:-1])]["model_family"]
    return req


def run_exchange(data_path: str) -> list[str]:
    """Drive the server one request at a time, resolving placeholders
    against earlier responses; returns the raw response lines."""
    lines: list[str] = []
    responses: list[dict] = []
    for template in REQUEST_TEMPLATES:
        req = resolve(template, responses, data_path)
        out = io.StringIO()
        serve(io.StringIO(json.dumps(req) + "\n"), out)
        line = out.getvalue()
        lines.append(line)
        responses.append(json.loads(line))
    return lines


def main():
    lines = run_exchange(FIXTURE)
    with open(os.path.join(DATA_DIR, "transcript_requests.jsonl"), "w",
              encoding="utf-8") as fh:
        for template in REQUEST_TEMPLATES:
            fh.write(json.dumps(template, sort_keys=True) + "\n")
    with open(os.path.join(DATA_DIR, "transcript_responses.jsonl"), "w",
              encoding="utf-8") as fh:
        fh.writelines(lines)
    for i, line in enumerate(lines):
        resp = json.loads(line)
        keys = {k: resp[k] for k in ("ok", "model_family", "accuracy")
                if k in resp}
        print(f"response {i}: {keys}")
    print("transcript recorded")


if __name__ == "__main__":
    main()
