"""Benchmark balance analysis: which benchmark rewards fusion fairly?

Feeding per-benchmark scores of the three experts (fused, RGB-only,
TIR-only) produces two gaps and a combined mean rank per benchmark:
a large fusion gap means the benchmark showcases multi-modal fusion, a
small modality gap means neither modality dominates.

Run with: python3 demos/04_benchmark_balance.py
"""

from fusebench import balanced_indicators, export_report

# Illustrative PR scores (percent) for five made-up benchmark suites.
scores = [
    #  name        fused  rgb   tir
    ("daylight",   91.0, 89.5, 71.0),   # RGB carries it; TIR far behind
    ("night",      78.0, 41.0, 74.0),   # TIR carries it
    ("mixed",      84.0, 70.0, 66.5),   # balanced, fusion helps a lot
    ("indoor",     88.0, 86.0, 83.0),   # everything easy, small gaps
    ("all-season", 81.0, 69.0, 64.0),   # balanced and challenging
]

table = balanced_indicators(scores, metric="PR")
print(export_report(table, "pretty-table"))

best = min(table.rows, key=lambda r: r.mean_rank)
print(f"most balanced suite by mean rank: {best.benchmark} ({best.mean_rank:g})")

print("\ncsv export (stable schema, 1-decimal percents):\n")
print(export_report(table, "csv"))

print("json-lines export round-trips losslessly; first two lines:")
print("\n".join(export_report(table, "json-lines").splitlines()[:2]))
