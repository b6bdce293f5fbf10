"""Separability scan at r = 0.7 with balanced beam splitters: CSV + SVG into ./results."""

from pathlib import Path

from entit.cli import main

out = Path(__file__).resolve().parent.parent / "results"
out.mkdir(exist_ok=True)
raise SystemExit(main(["fig2", "--out-csv", str(out / "fig2.csv"), "--out-svg", str(out / "fig2.svg")]))
