"""Record the reference-run regression baselines.

Run from the repository root after an intentional numerical change:

    python3 tests/baselines/record_reference.py
"""
import json
from pathlib import Path

from hundal_lab import _kernel
from hundal_lab.diagnostics import coordinate_decay, norm_floor
from hundal_lab.experiment import ExperimentConfig, execute, refine_study

HORIZON = 200
REFINE_STEPS = (1 / 8, 1 / 16, 1 / 32)
OUT = Path(__file__).with_name("reference_run.json")


def record() -> dict:
    # rows n = 0..HORIZON for every algorithm
    config = ExperimentConfig(iterations=HORIZON + 1, audit_samples=0)
    traces, _ = execute(config)
    measured = {}
    for name, trace in traces.items():
        rows = [r for r in trace if r.n <= HORIZON]
        floor, at = norm_floor(rows)
        measured[name] = {
            "norm_floor": floor,
            "norm_floor_at": at,
            "coordinate_decay": coordinate_decay(trace, early=10, at=HORIZON),
        }
    refine = refine_study(ExperimentConfig(iterations=HORIZON + 1), REFINE_STEPS)
    return {
        "config": {"dim": config.dim, "xi_max": config.effective_xi_max, "grid_step": config.grid_step,
                   "horizon": HORIZON, "init": config.init, "probes": list(config.probes)},
        "nnls_backend": _kernel.BACKEND,
        "measured": measured,
        "refinement": refine.as_dict(),
    }


if __name__ == "__main__":
    OUT.write_text(json.dumps(record(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT}")
