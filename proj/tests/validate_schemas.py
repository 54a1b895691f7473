"""Runs each CLI command that writes JSON and validates the output against
the shipped schemas."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    exe, docs, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    work.mkdir(parents=True, exist_ok=True)

    schemas = {}
    registry = Registry()
    for path in sorted(docs.glob("*.schema.json")):
        schema = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[path.name.removesuffix(".schema.json")] = schema
        registry = registry.with_resource(schema["$id"], Resource.from_contents(schema))

    series = work / "series.csv"
    rows = ["x,y,z"]
    state = 12345
    prev_y = prev_z = 0
    for _ in range(500):
        state = (state * 1103515245 + 12345) % (1 << 31)
        y, z = (state >> 16) & 1, (state >> 17) & 1
        rows.append(f"{prev_y ^ prev_z},{y},{z}")
        prev_y, prev_z = y, z
    series.write_text("\n".join(rows) + "\n")

    runs = [
        ("table1", ["table1", "--rules", "30,54", "--runs", "2", "--width", "30",
                    "--steps", "20", "--k", "3", "--out", str(work / "table1.json")]),
        ("or_demo", ["or-demo", "--delta", "0", "--out", str(work / "or_demo.json")]),
        ("lattice", ["lattice", "--sources", "3", "--out", str(work / "lattice.json")]),
        ("analyze", ["analyze", "--input", str(series), "--destination", "x",
                     "--sources", "y,z", "--k", "2", "--out", str(work / "analyze.json"),
                     "--save-distribution", str(work / "distribution.json")]),
    ]
    failed = 0
    for name, args in runs:
        proc = subprocess.run([exe, *args], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"FAIL {name}: exit {proc.returncode}: {proc.stderr.strip()}")
            failed += 1

    documents = {
        "table1": work / "table1.json",
        "or_demo": work / "or_demo.json",
        "lattice": work / "lattice.json",
        "analyze": work / "analyze.json",
        "distribution": work / "distribution.json",
    }
    analyze = json.loads(documents["analyze"].read_text()) if documents["analyze"].exists() else None
    for name, path in documents.items():
        try:
            doc = json.loads(path.read_text())
            jsonschema.Draft202012Validator(schemas[name], registry=registry).validate(doc)
            print(f"ok   {name}")
        except Exception as exc:  # noqa: BLE001
            print(f"FAIL {name}: {exc}")
            failed += 1
    if analyze is not None:
        try:
            jsonschema.Draft202012Validator(schemas["decomposition"], registry=registry).validate(
                analyze["decomposition"])
            print("ok   decomposition")
        except jsonschema.ValidationError as exc:
            print(f"FAIL decomposition: {exc}")
            failed += 1
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
