"""Entanglement and purity recovery for r = 0.5 at three loss levels: CSVs + SVG into ./results."""

from pathlib import Path

from entit.cli import main

out = Path(__file__).resolve().parent.parent / "results"
out.mkdir(exist_ok=True)
raise SystemExit(main(["fig3", "--out-csv", str(out / "fig3.csv"), "--out-svg", str(out / "fig3.svg")]))
