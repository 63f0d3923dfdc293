#!/usr/bin/env python3
"""Runs the sl2lab CLI end to end: schema validity of every report, exit
codes, CSV emission, config-file merging and worker-count independence."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

cli, root = sys.argv[1], Path(sys.argv[2]).resolve()
configs = root / "configs"
schema = json.loads((root / "schemas" / "report.schema.json").read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)
failures = []


def run(*args, expect=0):
    proc = subprocess.run([cli, *map(str, args)], capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append(f"{' '.join(map(str, args))}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
    return proc


def report(*args, expect=0):
    proc = run(*args, expect=expect)
    try:
        doc = json.loads(proc.stdout)
    except json.JSONDecodeError:
        failures.append(f"{' '.join(map(str, args))}: stdout is not JSON")
        return None
    errors = sorted(validator.iter_errors(doc), key=str)
    if errors:
        failures.append(f"{' '.join(map(str, args))}: schema: {errors[0].message}")
    return doc


example = configs / "example.json"
runs = {
    "lyap": ["--spec", example, "--steps", 2000, "--samples", 8],
    "robustness": ["--spec", example, "--trials", 5, "--steps", 2000],
    "continuity": ["--spec", example, "--steps", 2000, "--samples", 4],
    "scan-periodic": ["--spec", example, "--max-period", 2],
    "holonomy": ["--spec", example, "--pairs", 5],
    "bunching": ["--spec", example],
    "degree": ["--spec", example],
    "section": ["--spec", example, "--grid", 256],
    "natext": ["--k", 2, "--samples", 50],
}
for command, args in runs.items():
    doc = report(command, *args)
    if doc is not None and doc["command"] != command:
        failures.append(f"{command}: report names {doc['command']}")
    # results must not depend on the worker count
    a = report(command, *args, "--workers", 1, "--no-timestamps")
    b = report(command, *args, "--workers", 3, "--no-timestamps")
    if a and b and json.dumps(a["results"], sort_keys=True) != json.dumps(b["results"], sort_keys=True):
        failures.append(f"{command}: results differ between 1 and 3 workers")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    bad = tmp / "bad.json"
    bad.write_text('{"base": [[1, 0], [0, "one"]]}')
    proc = run("lyap", "--spec", bad, expect=1)
    if "base[1][1]" not in proc.stderr:
        failures.append(f"malformed spec error does not name the field: {proc.stderr!r}")

    broken = tmp / "broken.json"
    broken.write_text('{"base": [[1, 0],\n [0, 1]]')
    proc = run("lyap", "--spec", broken, expect=1)
    if "line 2" not in proc.stderr:
        failures.append(f"syntax error lacks a line number: {proc.stderr!r}")

    run("lyap", "--spec", example, "--method", "median", expect=1)
    run("frobnicate", expect=1)
    run("lyap", expect=1)
    run("scan-periodic", "--spec", example, "--max-period", 40, expect=1)
    # the k=2 variant is not bunched; most pairs never settle
    run("holonomy", "--spec", example, "--k", 2, "--pairs", 10, "--offset", 0.1, expect=2)

    csv = tmp / "table.csv"
    out = tmp / "report.json"
    run("continuity", "--spec", example, "--steps", 1000, "--samples", 4, "--csv", csv, "--out", out)
    lines = csv.read_text().splitlines() if csv.exists() else []
    if not lines or lines[0] != "j,c0_distance,value,std_error,delta" or len(lines) != 6:
        failures.append(f"unexpected continuity CSV: {lines}")
    if not out.exists() or validator.is_valid(json.loads(out.read_text())) is False:
        failures.append("--out report missing or invalid")

    cfg = tmp / "config.json"
    cfg.write_text(json.dumps({"spec": str(example), "k": 8, "steps": 1500, "samples": 4, "seed": 11}))
    doc = report("lyap", "--config", cfg, "--seed", 12)
    if doc and (doc["config"]["seed"] != 12 or doc["config"]["steps"] != 1500):
        failures.append(f"flags do not override config keys: {doc['config']}")

    # the shipped example config resolves its spec relative to itself
    doc = report("bunching", "--config", configs / "example_k2.json")
    if doc and doc["results"]["bunched"] is not False:
        failures.append("example_k2 config should not be bunched")

for f in failures:
    print("FAIL:", f)
print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
