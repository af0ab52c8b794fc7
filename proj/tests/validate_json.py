"""Runs every ddcomb subcommand with --format json and validates the output."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

RUNS = [
    ["bands", "--beta", "0.2"],
    ["bands", "--p", "0", "--eps-max", "80"],
    ["surface", "--n-sites", "10", "--p", "2", "--beta", "-0.3", "--u", "80"],
    ["wavefunction", "--beta", "0.2", "--state", "1", "--x-points", "50"],
    ["sweep-beta", "--steps", "11", "--oracle-every", "3"],
    ["oracle-compare", "--beta", "0.2"],
    ["surface", "--mass", "9.1093837015e-31", "--cell-width", "1e-9", "--alpha", "1.602176634e-28",
     "--wall", "8e-19"],
]


def main():
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, args in enumerate(RUNS):
            out = Path(tmp) / f"run{i}.json"
            proc = subprocess.run([cli, *args, "--format", "json", "--out", str(out)], capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            errors = sorted(validator.iter_errors(json.loads(out.read_text())), key=lambda e: list(e.path))
            for e in errors[:5]:
                print(f"FAIL {' '.join(args)}: {list(e.path)}: {e.message}")
            failures += bool(errors)
            if not errors:
                print(f"ok   {' '.join(args)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
