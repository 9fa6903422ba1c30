#!/usr/bin/env python3
"""Runs one spgo invocation and checks its exit code and report.

usage: cli_case.py --expect N [--schema FILE] [--check EXPR] [--twice] -- spgo args...

The report is read from stdout. EXPR is a Python expression over `r`
(the parsed report). --twice reruns the command and requires identical
output bytes.
"""
import argparse
import json
import subprocess
import sys


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--expect", type=int, required=True)
    ap.add_argument("--schema")
    ap.add_argument("--check", action="append", default=[])
    ap.add_argument("--twice", action="store_true")
    ap.add_argument("--env", action="append", default=[])
    ap.add_argument("cmd", nargs=argparse.REMAINDER)
    args = ap.parse_args()
    cmd = args.cmd[1:] if args.cmd and args.cmd[0] == "--" else args.cmd

    env = None
    if args.env:
        import os
        env = dict(os.environ)
        for kv in args.env:
            k, v = kv.split("=", 1)
            env[k] = v

    run = subprocess.run(cmd, capture_output=True, env=env)
    if run.returncode != args.expect:
        sys.stderr.write(run.stderr.decode())
        print(f"exit code {run.returncode}, expected {args.expect}")
        return 1
    if args.expect == 2:
        if not run.stderr:
            print("usage error without a message on stderr")
            return 1
        return 0

    report = json.loads(run.stdout)
    if args.schema:
        import jsonschema
        with open(args.schema) as f:
            jsonschema.validate(report, json.load(f))
    for expr in args.check:
        if not eval(expr, {}, {"r": report}):
            print(f"check failed: {expr}")
            return 1
    if args.twice:
        again = subprocess.run(cmd, capture_output=True, env=env)
        if again.stdout != run.stdout:
            print("second run produced a different report")
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
