"""Regenerate fig2_golden.json.  Run from the repository root:

    python tests/data/make_fig2_golden.py

The optimizer output is accepted only if it sits at or below the symmetric
dense-grid oracle and within 1e-2 of it.
"""
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from oracles import stateprep_symmetric_grid  # noqa: E402
from cohdisc.measures import OptimizerConfig  # noqa: E402
from cohdisc.protocols import StatePrepConfig, stateprep_bound_series  # noqa: E402

N, P, THETA = 6, 0.2, 0.45

rows = []
for rep in stateprep_bound_series(StatePrepConfig(N, P, THETA), OptimizerConfig()):
    l = rep.detail["l"]
    grid = stateprep_symmetric_grid(P, THETA, l, G=40)
    assert rep.lhs <= grid + 1e-9 and grid - rep.lhs < 1e-2, (l, rep.lhs, grid)
    rows.append({"l": l, "global_discord": rep.lhs, "bound_rhs": rep.rhs,
                 "deltaC_control": rep.detail["deltaC_control"],
                 "deltaC_target": rep.detail["deltaC_target"],
                 "oracle_symmetric_grid": grid})

out = pathlib.Path(__file__).with_name("fig2_golden.json")
out.write_text(json.dumps({"n": N, "p": P, "theta": THETA, "optimizer": "defaults, seed 0",
                           "series": rows}, indent=2) + "\n")
print(out.read_text())
