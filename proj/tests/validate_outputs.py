"""Runs each gbsc subcommand and checks its artifacts against schemas/."""

import argparse
import csv
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

CSV_HEADERS = {
    "curve.csv": ["arms_completed", "arm_index", "expected_regret", "cumulative"],
    "ksweep.csv": ["k", "mean_cum_regret", "stddev", "replicates"],
    "utilization.csv": ["subset_index", "subset_name", "play_count", "noplay_count"],
    "mask.csv": ["mode", "rate", "masked_cum", "unmasked_cum", "delta", "replicates"],
}

FAST = ["--trials", "300", "--epoch", "100", "--eval-arms", "20", "--eval-replicates", "2"]


def load_schemas(schema_dir):
    schemas = {}
    for name in ("manifest", "priors", "table"):
        with open(schema_dir / f"{name}.schema.json") as f:
            schema = json.load(f)
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[name] = jsonschema.Draft202012Validator(schema)
    return schemas


def check_dir(out_dir, schemas, failures):
    manifest = json.loads((out_dir / "manifest.json").read_text())
    listed = set(manifest["artifacts"])
    present = {p.name for p in out_dir.iterdir()}
    if listed != present:
        failures.append(f"{out_dir.name}: manifest lists {sorted(listed)}, found {sorted(present)}")
    for path in sorted(out_dir.iterdir()):
        if path.suffix == ".json":
            kind = {"manifest.json": "manifest", "priors.json": "priors"}.get(path.name, "table")
            for err in schemas[kind].iter_errors(json.loads(path.read_text())):
                failures.append(f"{out_dir.name}/{path.name}: {err.message} at {list(err.absolute_path)}")
            if kind == "table":
                table = json.loads(path.read_text())
                expected = CSV_HEADERS[path.stem + ".csv"]
                if table["columns"] != expected:
                    failures.append(f"{out_dir.name}/{path.name}: columns {table['columns']}")
                for row in table["rows"]:
                    if len(row) != len(expected):
                        failures.append(f"{out_dir.name}/{path.name}: row width {len(row)}")
        elif path.suffix == ".csv":
            with open(path, newline="") as f:
                rows = list(csv.reader(f))
            if not rows or rows[0] != CSV_HEADERS[path.name]:
                failures.append(f"{out_dir.name}/{path.name}: header {rows[:1]}")
            for row in rows[1:]:
                if len(row) != len(rows[0]):
                    failures.append(f"{out_dir.name}/{path.name}: row width {len(row)}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--gbsc", required=True)
    parser.add_argument("--data", required=True)
    parser.add_argument("--schemas", required=True)
    args = parser.parse_args()

    data = os.environ.get("GBSC_DATA") or args.data
    schemas = load_schemas(Path(args.schemas))
    failures = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        runs = {
            "train-csv": ["train"],
            "train-json": ["train", "--format", "json"],
            "sweep-csv": ["sweep-k", "--ks", "1..4", "--replicates", "2"],
            "sweep-json": ["sweep-k", "--ks", "2", "--replicates", "1", "--format", "json"],
            "importance": ["importance", "--replicates", "2"],
            "importance-json": ["importance", "--replicates", "2", "--format", "json"],
            "mask-random": ["mask", "--mode", "random", "--rate", "0.5", "--replicates", "2"],
        }
        for name, cmd in runs.items():
            out = tmp / name
            out.mkdir()
            subprocess.run([args.gbsc, *cmd, *FAST, "--data", data, "--out", str(out)], check=True,
                           stdout=subprocess.DEVNULL)
            check_dir(out, schemas, failures)
        out = tmp / "mask-priority"
        out.mkdir()
        subprocess.run([args.gbsc, "mask", "--mode", "priority", "--rate", "0.3", "--replicates", "2",
                        "--utilization", str(tmp / "importance" / "utilization.csv"), *FAST, "--data", data,
                        "--out", str(out)], check=True, stdout=subprocess.DEVNULL)
        check_dir(out, schemas, failures)

    for f in failures:
        print("FAIL", f)
    print(f"{len(runs) + 1} runs checked, {len(failures)} problems")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
