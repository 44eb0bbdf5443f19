"""Runs every asclt subcommand and validates its JSON artifact against the schema."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

COMMANDS = [
    ["check-weights", "--kind", "trig", "--n", "64", "--r", "31"],
    ["check-weights", "--kind", "haar", "--n", "32"],
    ["asclt", "--schedule", "256:127,1024:511", "--family", "two_point", "--params", "0.3"],
    ["asclt", "--weights", "haar", "--schedule", "64:64"],
    ["bivariate", "--schedule", "1024:511", "--family", "normal"],
    ["char-decay", "--schedule", "64:31,128:63", "--replicas", "100"],
    ["clt-fluct", "--n", "256", "--r", "16", "--replicas", "100"],
    ["ldp", "--n", "256", "--r", "16", "--replicas", "200"],
    ["periodogram", "--sizes", "101,1024", "--family", "exponential"],
    ["spectrum", "--n", "65", "--ensemble", "symmetric"],
    ["spectrum", "--n", "64", "--ensemble", "reverse"],
    ["spectrum", "--n", "32", "--ensemble", "palindromic"],
    ["spectrum", "--n", "16", "--ensemble", "raw"],
    ["gen-weights", "--weights", "trig", "--n", "9", "--r", "4"],
]


def main() -> int:
    tool, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in COMMANDS:
        with tempfile.TemporaryDirectory() as out:
            proc = subprocess.run([tool, *args, "--out", out], capture_output=True, text=True)
            label = " ".join(args)
            if proc.returncode != 0:
                print(f"FAIL {label}: exit {proc.returncode}\n{proc.stderr}")
                failures += 1
                continue
            docs = list(pathlib.Path(out).glob("*.json"))
            if len(docs) != 1:
                print(f"FAIL {label}: expected one JSON file, found {len(docs)}")
                failures += 1
                continue
            errors = sorted(validator.iter_errors(json.loads(docs[0].read_text())), key=str)
            if errors:
                print(f"FAIL {label}: {errors[0].message} at {list(errors[0].absolute_path)}")
                failures += 1
            else:
                print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
