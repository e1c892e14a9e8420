"""
Experiment harness.

An ExperimentSpec is expanded into a list of runs. Each run has an index and a
seed derived from (master_seed, run index); it generates its own instance,
solves it with every requested solver and returns result rows. Runs are
independent, so `workers > 1` maps them over a process pool; rows are always
ordered by run index.

Run layout per experiment kind:

    table1  one run per (pattern, noise, missing, repetition)
    sweep   one run per repetition, looping over mu_grid and solvers
    pose    one run per repetition, looping over etas, mu_grid and solvers
    nrsfm   one run per repetition, looping over mu_grid and solvers
    bias    a single run
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import yaml
from bilinrank_common import (
    BilinrankError,
    RankOverflowError,
    Tolerances,
    ValidationError,
    clear_run_id,
    expand_env_vars,
    get_logger,
    set_run_id,
)
from bilinrank_core import (
    FactorPair,
    MeasurementOp,
    PoseOp,
    admm_solve,
    balanced_factorize,
    certificate_mu,
    certify,
    data_term,
    matrix_rank,
    minimal_suppressing_weight,
    singular_values,
    solve,
    sv_prox,
)
from bilinrank_schema import (
    AdmmConfig,
    ExperimentSpec,
    Penalty,
    SolveReport,
    SolverConfig,
    experiment_from_dict,
)
from bilinrank_telemetry import observe_failure, observe_solve

from .datagen import (
    derive_seed,
    gen_instance,
    gen_nrsfm_scene,
    gen_pose_scene,
    make_rng,
    normalized_distance,
)
from .results import (
    RUN_COLUMNS,
    TABLE1_COLUMNS,
    TABLE1_RUN_COLUMNS,
    ExperimentResult,
    Row,
    mean_std,
)

logger = get_logger("experiments.harness")


@dataclass(frozen=True)
class RunTask:
    """One independent unit of work."""

    run_index: int
    seed: int
    params: Dict[str, Any] = field(default_factory=dict)


# =============================================================================
# SPEC LOADING
# =============================================================================


def load_experiment(path: Path) -> ExperimentSpec:
    """
    Read an experiment YAML file, expanding ${VAR} references.

    Raises:
        ValidationError: If the file is missing, not a mapping, or invalid
    """
    if not path.exists():
        raise ValidationError(f"Experiment file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ValidationError(f"Invalid YAML in {path}: {e}") from e
    if not isinstance(data, dict):
        raise ValidationError(f"Experiment file {path} must contain a mapping")
    return experiment_from_dict(expand_env_vars(data))


def override_dict(data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """
    Apply dotted-key overrides to a raw spec dictionary (in place).

    None values are ignored, so CLI flags that were not given pass through.
    Missing sections are created.
    """
    for key, value in overrides.items():
        if value is None:
            continue
        section = data
        *parents, leaf = key.split(".")
        for name in parents:
            section = section.setdefault(name, {})
        section[leaf] = value
    return data


def with_overrides(spec: ExperimentSpec, overrides: Dict[str, Any]) -> ExperimentSpec:
    """
    Copy of spec with dotted-key overrides applied and re-validated.

    Examples:
        >>> with_overrides(spec, {"instance.k": 6, "repetitions": 2})
    """
    return experiment_from_dict(override_dict(spec.model_dump(), overrides))


# =============================================================================
# RUN PLANNING
# =============================================================================


def plan_runs(spec: ExperimentSpec) -> List[RunTask]:
    """Expand a spec into its runs, in run-index order."""
    if spec.kind == "bias":
        return [RunTask(0, derive_seed(spec.master_seed, 0))]
    if spec.kind == "table1":
        grid = [
            {"pattern": pattern, "noise": noise, "missing": missing}
            for pattern in spec.table1.patterns
            for noise in spec.table1.noise_levels
            for missing in spec.table1.missing_levels
            for _ in range(spec.repetitions)
        ]
        return [
            RunTask(index, derive_seed(spec.master_seed, index), params)
            for index, params in enumerate(grid)
        ]
    return [RunTask(index, derive_seed(spec.master_seed, index)) for index in range(spec.repetitions)]


# =============================================================================
# SOLVER PLUMBING
# =============================================================================


def solver_penalty(solver: str, mu: float) -> Penalty:
    """
    Penalty a solver minimizes for the weight mu.

    The nuclear baseline uses weight sqrt(mu). Its prox soft-thresholds at
    sqrt(mu) / 2, half the fmu hard threshold; the nuclear weight is a baseline
    setting of its own, not a matched one.
    """
    if solver in ("varpro", "admm_fmu"):
        return Penalty.fmu(mu)
    if solver == "admm_rank":
        return Penalty.rank(mu)
    if solver == "admm_nuclear":
        return Penalty.nuclear(math.sqrt(mu))
    raise ValidationError(f"Unknown solver '{solver}'")


def _ordered_solvers(solvers: List[str]) -> List[str]:
    # varpro first: ADMM budgets may depend on its wall time
    return sorted(solvers, key=lambda name: name != "varpro")


def _run_solver(
    spec: ExperimentSpec,
    solver: str,
    penalty: Penalty,
    op: MeasurementOp,
    b: np.ndarray,
    k: int,
    seed: int,
    varpro_seconds: Optional[float] = None,
) -> SolveReport:
    if solver == "varpro":
        cfg = SolverConfig(
            penalty=penalty,
            k=k,
            seed=seed,
            budget_seconds=spec.budget_seconds,
            **spec.varpro.model_dump(),
        )
        return solve(cfg, op, b)

    budget = spec.budget_seconds
    if spec.admm.match_varpro_time and varpro_seconds is not None:
        budget = max(varpro_seconds, 1e-6)
    admm_cfg = AdmmConfig(
        penalty=penalty,
        seed=seed,
        budget_seconds=budget,
        **spec.admm.model_dump(exclude={"match_varpro_time"}),
    )
    return admm_solve(admm_cfg, op, b)


def _solve_fields(spec: ExperimentSpec, report: SolveReport) -> Row:
    return {
        "iterations": report.iterations,
        "seconds": report.seconds if spec.record_timing else 0.0,
        "termination": report.termination,
        "error": None,
    }


def _failure_fields(error: BilinrankError) -> Row:
    return {"iterations": None, "seconds": None, "termination": None, "error": error.code}


def _certified(
    spec: ExperimentSpec,
    op: MeasurementOp,
    b: np.ndarray,
    report: SolveReport,
    penalty: Penalty,
    k: int,
) -> Optional[bool]:
    """Certificate status, or None when the penalty is outside the certificate's scope."""
    try:
        certificate_mu(penalty)
    except ValidationError:
        return None
    if report.B is not None and report.C is not None:
        F = FactorPair(report.B, report.C)
    else:
        try:
            F = balanced_factorize(report.X, k)
        except RankOverflowError:
            return False
    return certify(op, b, F, penalty, spec.delta).certified


def _sweep_fields(
    spec: ExperimentSpec,
    op: MeasurementOp,
    b: np.ndarray,
    report: SolveReport,
    penalty: Penalty,
    k: int,
) -> Row:
    return {
        "final_rank": matrix_rank(report.X, Tolerances.SWEEP_RANK_REL),
        "datafit": data_term(op, b, report.X),
        "objective": report.final_objective,
        "certified": _certified(spec, op, b, report, penalty, k),
    }


def _rms(residual: np.ndarray) -> float:
    return float(np.sqrt(np.mean(residual**2))) if residual.size else 0.0


# =============================================================================
# RUNS
# =============================================================================


def _table1_run(spec: ExperimentSpec, task: RunTask) -> List[Row]:
    inst = spec.instance
    base = {"run_index": task.run_index, "seed": task.seed, **task.params}
    mu = spec.table1_mu()
    solvers = _ordered_solvers(spec.solvers)
    try:
        instance = gen_instance(
            inst.rows,
            inst.cols,
            inst.rank,
            task.params["pattern"],
            task.params["missing"],
            task.params["noise"],
            task.seed,
            strict=inst.strict,
        )
    except BilinrankError as e:
        logger.warning("Instance generation failed", run_index=task.run_index, error=e.code)
        return [{**base, "solver": s, "mu": mu, **_failure_fields(e)} for s in solvers]

    op, b = instance.operator(), instance.measurements()
    base["missing_realized"] = instance.meta.missing_realized
    rows = []
    varpro_seconds = None
    for solver in solvers:
        row = {**base, "solver": solver, "mu": mu}
        try:
            report = _run_solver(
                spec, solver, solver_penalty(solver, mu), op, b, inst.k, task.seed, varpro_seconds
            )
        except BilinrankError as e:
            logger.warning("Solve failed", solver=solver, run_index=task.run_index, error=e.code)
            rows.append({**row, **_failure_fields(e)})
            continue
        if solver == "varpro":
            varpro_seconds = report.seconds
        row["dist"] = normalized_distance(report.X, instance.M0)
        rows.append({**row, **_solve_fields(spec, report)})
    return rows


def _sweep_run(spec: ExperimentSpec, task: RunTask) -> List[Row]:
    inst = spec.instance
    base = {"run_index": task.run_index, "seed": task.seed}
    try:
        instance = gen_instance(
            inst.rows,
            inst.cols,
            inst.rank,
            inst.pattern,
            inst.missing,
            inst.noise,
            task.seed,
            strict=inst.strict,
        )
    except BilinrankError as e:
        return [
            {**base, "solver": s, "mu": mu, **_failure_fields(e)}
            for mu in spec.mu_grid
            for s in _ordered_solvers(spec.solvers)
        ]

    op, b = instance.operator(), instance.measurements()
    rows = []
    for mu in spec.mu_grid:
        varpro_seconds = None
        for solver in _ordered_solvers(spec.solvers):
            row = {**base, "solver": solver, "mu": mu}
            penalty = solver_penalty(solver, mu)
            try:
                report = _run_solver(spec, solver, penalty, op, b, inst.k, task.seed, varpro_seconds)
                row.update(_sweep_fields(spec, op, b, report, penalty, inst.k))
            except BilinrankError as e:
                rows.append({**row, **_failure_fields(e)})
                continue
            if solver == "varpro":
                varpro_seconds = report.seconds
            row["dist"] = normalized_distance(report.X, instance.M0)
            rows.append({**row, **_solve_fields(spec, report)})
    return rows


def _geometric_rows(
    spec: ExperimentSpec,
    base: Row,
    op: MeasurementOp,
    b: np.ndarray,
    k: int,
    seed: int,
    residual_fields: Callable[[np.ndarray], Row],
) -> List[Row]:
    """Rows of every (mu, solver) pair on one scene, varpro first within each mu."""
    rows = []
    for mu in spec.mu_grid:
        varpro_seconds = None
        for solver in _ordered_solvers(spec.solvers):
            row = {**base, "solver": solver, "mu": mu}
            penalty = solver_penalty(solver, mu)
            try:
                report = _run_solver(spec, solver, penalty, op, b, k, seed, varpro_seconds)
                row.update(_sweep_fields(spec, op, b, report, penalty, k))
            except BilinrankError as e:
                logger.warning("Solve failed", solver=solver, mu=mu, error=e.code)
                rows.append({**row, **_failure_fields(e)})
                continue
            if solver == "varpro":
                varpro_seconds = report.seconds
            row.update(residual_fields(report.X))
            rows.append({**row, **_solve_fields(spec, report)})
    return rows


def _scene_failure_rows(spec: ExperimentSpec, base: Row, error: BilinrankError) -> List[Row]:
    logger.warning("Scene generation failed", run_index=base["run_index"], error=error.code)
    return [
        {**base, "solver": s, "mu": mu, **_failure_fields(error)}
        for mu in spec.mu_grid
        for s in _ordered_solvers(spec.solvers)
    ]


def _pose_residuals(op: PoseOp, X: np.ndarray) -> Row:
    return {"ose_rms": _rms(op.ose_residual(X)), "affine_rms": _rms(op.affine_residual(X))}


def _pose_run(spec: ExperimentSpec, task: RunTask) -> List[Row]:
    pose = spec.pose
    base = {"run_index": task.run_index, "seed": task.seed}
    try:
        scene = gen_pose_scene(
            pose.frames,
            pose.points,
            pose.etas[0],
            task.seed,
            projective=pose.projective,
            missing_frac=pose.missing,
        )
    except BilinrankError as e:
        return [
            row for eta in pose.etas for row in _scene_failure_rows(spec, {**base, "eta": eta}, e)
        ]

    rows = []
    for eta in pose.etas:
        op = scene.op.with_eta(eta)
        residuals = partial(_pose_residuals, op)
        rows.extend(
            _geometric_rows(spec, {**base, "eta": eta}, op, op.rhs(), pose.k, task.seed, residuals)
        )
    return rows


def _nrsfm_run(spec: ExperimentSpec, task: RunTask) -> List[Row]:
    nrsfm = spec.nrsfm
    base = {"run_index": task.run_index, "seed": task.seed}
    try:
        scene = gen_nrsfm_scene(nrsfm.frames, nrsfm.points, nrsfm.basis, task.seed)
    except BilinrankError as e:
        return _scene_failure_rows(spec, base, e)

    def residuals(X: np.ndarray) -> Row:
        return {"shape_dist": normalized_distance(X, scene.X_sharp)}

    return _geometric_rows(spec, base, scene.op, scene.b, nrsfm.k, task.seed, residuals)


def bias_spectrum(spec: ExperimentSpec, seed: int) -> np.ndarray:
    """Descending singular values of X0: upper half high, lower half low."""
    bias = spec.bias
    rng = make_rng(seed)
    low_count = bias.values // 2
    high = np.sort(rng.uniform(bias.high_min, bias.high_max, bias.values - low_count))[::-1]
    low = np.sort(rng.uniform(bias.low_min, bias.low_max, low_count))[::-1]
    return np.concatenate([high, low])


def bias_penalties(spec: ExperimentSpec) -> List[Penalty]:
    """Unit-weight templates of the compared regularizers."""
    return [Penalty.fmu(1.0), Penalty.nuclear(1.0)] + [
        Penalty.schatten(1.0, q) for q in spec.bias.schatten_q
    ]


def _bias_run(spec: ExperimentSpec, task: RunTask) -> List[Row]:
    bias = spec.bias
    s = bias_spectrum(spec, task.seed)
    rng = make_rng(derive_seed(task.seed, 1))
    U, _ = np.linalg.qr(rng.standard_normal((bias.size, bias.values)))
    V, _ = np.linalg.qr(rng.standard_normal((bias.size, bias.values)))
    X0 = (U * s) @ V.T
    suppress = float(s[bias.values - bias.values // 2])

    rows = []
    for template in bias_penalties(spec):
        weight = minimal_suppressing_weight(template, suppress)
        name = "mu" if "mu" in template.parameters() else "lambda"
        penalty = template.with_parameter(name, weight)
        s_prox = singular_values(sv_prox(penalty, X0))
        for i in range(bias.values):
            rows.append(
                {
                    "run_index": task.run_index,
                    "seed": task.seed,
                    "regularizer": str(penalty),
                    "weight": weight,
                    "index": i + 1,
                    "sigma_x0": float(s[i]),
                    "sigma_prox": float(s_prox[i]),
                }
            )
    return rows


_RUNNERS: Dict[str, Callable[[ExperimentSpec, RunTask], List[Row]]] = {
    "table1": _table1_run,
    "sweep": _sweep_run,
    "pose": _pose_run,
    "nrsfm": _nrsfm_run,
    "bias": _bias_run,
}


def execute_task(spec: ExperimentSpec, task: RunTask) -> List[Row]:
    """Run one task; solver failures become rows with an error code."""
    set_run_id(f"{spec.kind}-{task.run_index}")
    try:
        logger.info("Run started", run_index=task.run_index, seed=task.seed, **task.params)
        rows = _RUNNERS[spec.kind](spec, task)
        failed = sum(1 for row in rows if row.get("error"))
        logger.info("Run finished", run_index=task.run_index, rows=len(rows), failures=failed)
        return rows
    finally:
        clear_run_id()


def _execute_all(spec: ExperimentSpec, tasks: List[RunTask]) -> List[List[Row]]:
    worker = partial(execute_task, spec)
    if spec.workers > 1 and len(tasks) > 1:
        # Pool.map returns results in task order whatever the completion order
        with Pool(processes=min(spec.workers, len(tasks))) as pool:
            return pool.map(worker, tasks)
    return [worker(task) for task in tasks]


# =============================================================================
# AGGREGATION AND CHECKS
# =============================================================================


def _table1_summary(runs: List[Row]) -> List[Row]:
    groups: Dict[Tuple, List[Row]] = defaultdict(list)
    for row in runs:
        groups[(row["pattern"], row["noise"], row["missing"], row["solver"])].append(row)

    summary = []
    for (pattern, noise, missing, solver), rows in groups.items():
        ok = [row for row in rows if not row.get("error")]
        mean_dist, std_dist = mean_std([row["dist"] for row in ok])
        mean_iters, _ = mean_std([float(row["iterations"]) for row in ok])
        mean_seconds, _ = mean_std([row["seconds"] for row in ok])
        summary.append(
            {
                "pattern": pattern,
                "noise": noise,
                "missing": missing,
                "solver": solver,
                "runs": len(rows),
                "failures": len(rows) - len(ok),
                "mean_dist": mean_dist,
                "std_dist": std_dist,
                "mean_iters": mean_iters,
                "mean_seconds": mean_seconds,
            }
        )
    return summary


def monotonicity_violations(rows: List[Row], group_keys: Tuple[str, ...]) -> List[str]:
    """
    Places where final_rank increases with mu inside a group of rows.

    Local minima can cause these, so they are reported rather than raised.
    """
    groups: Dict[Tuple, List[Row]] = defaultdict(list)
    for row in rows:
        if not row.get("error"):
            groups[tuple(row[key] for key in group_keys)].append(row)

    messages = []
    for key, group in groups.items():
        ordered = sorted(group, key=lambda row: row["mu"])
        for prev, cur in zip(ordered, ordered[1:]):
            if cur["final_rank"] > prev["final_rank"]:
                label = ", ".join(f"{k}={v}" for k, v in zip(group_keys, key))
                messages.append(
                    f"final_rank rises from {prev['final_rank']} at mu={prev['mu']:g} "
                    f"to {cur['final_rank']} at mu={cur['mu']:g} ({label})"
                )
    return messages


def _observe(kind: str, rows: List[Row]) -> None:
    for row in rows:
        if row.get("error"):
            observe_failure(kind, row["error"])
        elif row.get("termination"):
            observe_solve(
                row.get("solver", "varpro"), row["termination"], row["seconds"], row["iterations"]
            )


def _finalize(spec: ExperimentSpec, rows: List[Row]) -> ExperimentResult:
    failures = sum(1 for row in rows if row.get("error"))
    if spec.kind == "table1":
        return ExperimentResult(
            kind="table1",
            columns=TABLE1_COLUMNS,
            rows=_table1_summary(rows),
            failures=failures,
            runs=rows,
            run_columns=TABLE1_RUN_COLUMNS,
        )

    warnings: List[str] = []
    if spec.kind == "sweep" and spec.instance.noise == 0:
        warnings = monotonicity_violations(rows, ("run_index", "solver"))
    elif spec.kind == "pose":
        warnings = monotonicity_violations(rows, ("run_index", "eta", "solver"))
    elif spec.kind == "nrsfm":
        warnings = monotonicity_violations(rows, ("run_index", "solver"))
    return ExperimentResult(
        kind=spec.kind, columns=RUN_COLUMNS[spec.kind], rows=rows, failures=failures, warnings=warnings
    )


# =============================================================================
# ENTRY POINTS
# =============================================================================


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """
    Run every run of an experiment and assemble the result table.

    Solver failures are recorded as rows with an error code; only problems
    with the experiment file itself raise.
    """
    tasks = plan_runs(spec)
    log = logger.with_context(experiment=spec.kind, master_seed=spec.master_seed)
    log.info("Experiment started", runs=len(tasks), workers=spec.workers)
    rows = [row for chunk in _execute_all(spec, tasks) for row in chunk]
    _observe(spec.kind, rows)
    result = _finalize(spec, rows)
    for message in result.warnings:
        log.warning("Sweep monotonicity violated", detail=message)
    log.info(
        "Experiment finished",
        rows=len(result.rows),
        failures=result.failures,
        warnings=len(result.warnings),
    )
    return result


def _require_kind(spec: ExperimentSpec, kind: str) -> None:
    if spec.kind != kind:
        raise ValidationError(f"expected a {kind} experiment, got kind '{spec.kind}'")


def run_table1(spec: ExperimentSpec) -> ExperimentResult:
    _require_kind(spec, "table1")
    return run_experiment(spec)


def run_sweep(spec: ExperimentSpec) -> ExperimentResult:
    _require_kind(spec, "sweep")
    return run_experiment(spec)


def run_bias(spec: ExperimentSpec) -> ExperimentResult:
    _require_kind(spec, "bias")
    return run_experiment(spec)


def run_pose(spec: ExperimentSpec) -> ExperimentResult:
    _require_kind(spec, "pose")
    return run_experiment(spec)


def run_nrsfm(spec: ExperimentSpec) -> ExperimentResult:
    _require_kind(spec, "nrsfm")
    return run_experiment(spec)


def replay(spec: ExperimentSpec, run_index: int) -> List[Row]:
    """
    Re-execute one run of an experiment and return its rows.

    The run's seed and parameters are recomputed from the experiment, so the rows
    match the ones stored in the result file (timing columns aside).

    Raises:
        ValidationError: If run_index is outside the experiment
    """
    tasks = plan_runs(spec)
    if not 0 <= run_index < len(tasks):
        raise ValidationError(
            f"run index {run_index} is outside the experiment's {len(tasks)} runs"
        )
    return execute_task(spec, tasks[run_index])
