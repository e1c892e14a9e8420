"""
bilinrank Experiments Package

Synthetic instances and the experiment harness:

- datagen: low-rank ground truth, noise, uniform and tracking masks,
  pOSE and non-rigid scenes, instance directories
- results: result tables and their versioned CSV form
- harness: table1, sweep, bias, pose and nrsfm experiments, replay

Usage:
    from pathlib import Path
    from bilinrank_experiments import load_experiment, run_experiment, write_result

    spec = load_experiment(Path("experiments/table1.yaml"))
    result = run_experiment(spec)
    write_result(result, Path(spec.output))
"""

from .datagen import (
    InstanceMeta,
    NrsfmScene,
    PoseScene,
    ProblemInstance,
    add_noise,
    derive_seed,
    gen_instance,
    gen_low_rank,
    gen_nrsfm_scene,
    gen_pose_scene,
    load_instance,
    make_rng,
    normalized_distance,
    save_instance,
    tracking_mask,
    uniform_mask,
)
from .harness import (
    RunTask,
    execute_task,
    load_experiment,
    monotonicity_violations,
    override_dict,
    plan_runs,
    replay,
    run_bias,
    run_experiment,
    run_nrsfm,
    run_pose,
    run_sweep,
    run_table1,
    solver_penalty,
    with_overrides,
)
from .results import (
    RUN_COLUMNS,
    ExperimentResult,
    best_at_rank,
    format_value,
    read_csv,
    render_csv,
    runs_path,
    write_csv,
    write_result,
)

__version__ = "0.1.0"

__all__ = [
    # Datagen
    "make_rng",
    "derive_seed",
    "gen_low_rank",
    "add_noise",
    "normalized_distance",
    "uniform_mask",
    "tracking_mask",
    "InstanceMeta",
    "ProblemInstance",
    "gen_instance",
    "save_instance",
    "load_instance",
    "PoseScene",
    "gen_pose_scene",
    "NrsfmScene",
    "gen_nrsfm_scene",
    # Harness
    "RunTask",
    "plan_runs",
    "execute_task",
    "run_experiment",
    "run_table1",
    "run_sweep",
    "run_bias",
    "run_pose",
    "run_nrsfm",
    "replay",
    "load_experiment",
    "with_overrides",
    "override_dict",
    "solver_penalty",
    "monotonicity_violations",
    # Results
    "ExperimentResult",
    "best_at_rank",
    "RUN_COLUMNS",
    "format_value",
    "write_csv",
    "write_result",
    "read_csv",
    "render_csv",
    "runs_path",
]
