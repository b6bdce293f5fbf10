"""Run every verification command and summarise exit codes.

Reports go to ./results/<command>.csv. Exit status is the number of
commands that failed.
"""

from pathlib import Path

from entit.cli import main

out = Path(__file__).resolve().parent.parent / "results"
out.mkdir(exist_ok=True)

summary = {}
for cmd in ("entit", "swap", "zoology", "expansions"):
    print(f"\n=== {cmd}")
    summary[cmd] = main([cmd, "--out-csv", str(out / f"{cmd}.csv")])

print("\n=== summary")
for cmd, code in summary.items():
    print(f"{cmd:12s} {'ok' if code == 0 else f'FAILED (exit {code})'}")
raise SystemExit(sum(code != 0 for code in summary.values()))
