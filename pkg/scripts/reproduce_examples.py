#!/usr/bin/env python3
"""Verify the shipped examples into out/<name>/."""

from tiltsight.cli import main


EXAMPLES = ["example-1", "example-2"]


if __name__ == "__main__":
    codes = [main(["verify", "--example", name, "--out-dir", f"out/{name}"]) for name in EXAMPLES]
    raise SystemExit(max(codes))
