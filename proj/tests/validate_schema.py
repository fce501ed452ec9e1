#!/usr/bin/env python3
"""Validate fixture manifests and the CLI's JSON reports against docs/*.schema.json.

usage: validate_schema.py <crossinspect> <docs dir> <fixtures dir>
"""
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, docs, fixtures = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    manifest_schema = json.loads((docs / "manifest.schema.json").read_text())
    report_schema = json.loads((docs / "report.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(manifest_schema)
    jsonschema.Draft202012Validator.check_schema(report_schema)

    failures = 0
    manifests = sorted(fixtures.glob("*.json"))
    if not manifests:
        print("no manifests found", file=sys.stderr)
        return 1
    for m in manifests:
        try:
            jsonschema.validate(json.loads(m.read_text()), manifest_schema)
            for extra in ([], ["--timing"], ["--serial"], ["--semantics", "off"]):
                out = subprocess.run(
                    [cli, "analyze", "--manifest", str(m), "--format", "json", "--exit-zero", *extra],
                    check=True, capture_output=True, text=True).stdout
                jsonschema.validate(json.loads(out), report_schema)
            print(f"ok   {m.name}")
        except (jsonschema.ValidationError, subprocess.CalledProcessError, json.JSONDecodeError) as e:
            failures += 1
            print(f"FAIL {m.name}: {e}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
