#!/usr/bin/env python3
"""Runs every CLI subcommand once and validates its JSON output against docs/schemas."""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def load_schemas(root):
    schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text()) for p in root.glob("*.schema.json")}
    # the decomposition schema refers to the automaton schema by file name
    schemas["decompose"]["items"]["properties"]["automaton"] = schemas["va"]
    return schemas


def main():
    cli, schema_dir = sys.argv[1], Path(sys.argv[2])
    schemas = load_schemas(schema_dir)
    failures = 0

    def run(*args, env=None):
        res = subprocess.run([cli, *args], capture_output=True, text=True, env=env)
        if res.returncode != 0:
            raise RuntimeError(f"{' '.join(args)} exited with {res.returncode}: {res.stderr}")
        return res

    def check(name, instance, label):
        nonlocal failures
        try:
            jsonschema.validate(instance, schemas[name])
            print(f"ok   {label}")
        except jsonschema.ValidationError as e:
            failures += 1
            print(f"FAIL {label}: {e.message}")

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        va = tmp / "va.json"
        run("compile", "x{a*} b a* | a* b x{a*} | y{a*b}x{a*}", "-o", str(va))
        check("va", json.loads(va.read_text()), "compile")

        res = run("eval", str(va), "--doc", "aab")
        for line in res.stdout.splitlines():
            check("mapping", json.loads(line), "eval line")

        for mode in ("direct", "compiled"):
            res = run("skyline", str(va), "--doc", "aab", "--rule", "spaninc", "--mode", mode, "--stats")
            for line in res.stdout.splitlines():
                check("mapping", json.loads(line), f"skyline {mode} line")
            check("skyline_stats", json.loads(res.stderr), f"skyline {mode} stats")

        check("rule_analysis", json.loads(run("analyze-rule", "varinc", "--doc", "ab").stdout), "analyze-rule")
        check("nrobp", json.loads(run("nrobp", str(va), "--doc", "aab", "--count").stdout), "nrobp")
        check("validation", json.loads(run("validate-rule", "spanlen", "--doc", "ab").stdout), "validate-rule")

        cnf = tmp / "f.cnf"
        cnf.write_text("p cnf 2 2\n1 2 0\n-1 0\n")
        out = tmp / "red"
        run("reduce", "sat-skyline", str(cnf), "-o", str(out))
        check("manifest", json.loads((out / "manifest.json").read_text()), "reduce manifest")
        check("va", json.loads((out / "va.json").read_text()), "reduce va")

        other = tmp / "other.json"
        run("compile", "x{a} | b", "-o", str(other))
        for op in ("union", "join", "intersection", "difference"):
            check("va", json.loads(run("va", op, str(va), str(other)).stdout), f"va {op}")
        for op in ("trim", "eliminate-epsilon", "order", "determinize", "dagger"):
            check("va", json.loads(run("va", op, str(va)).stdout), f"va {op}")
        check("va", json.loads(run("va", "project", str(va), "--vars", "x").stdout), "va project")
        check("va_stats", json.loads(run("va", "stats", str(va)).stdout), "va stats")
        check("decompose", json.loads(run("va", "decompose", str(va)).stdout), "va decompose")

        env = dict(os.environ, SPANLINE_SEED="3")
        check("va", json.loads(run("gen", "va", env=env).stdout), "gen va")

    print(f"{failures} schema failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
