"""Gen command - Generate synthetic problems."""

from pathlib import Path

import typer
from bilinrank_common import HarnessDefaults, ValidationError
from bilinrank_experiments import gen_instance, gen_nrsfm_scene, gen_pose_scene, save_instance

from .problems import save_nrsfm_scene, save_pose_scene
from .utils import console, handle_error, success

SCENES = ("completion", "pose", "nrsfm")


def gen(
    out: Path = typer.Option(..., "--out", "-o", help="Directory to write the problem to"),
    scene: str = typer.Option("completion", "--scene", help="completion, pose or nrsfm"),
    seed: int = typer.Option(0, "--seed", help="Generator seed"),
    rows: int = typer.Option(HarnessDefaults.ROWS, "--rows", help="Completion: rows (frames)"),
    cols: int = typer.Option(HarnessDefaults.COLS, "--cols", help="Completion: columns (tracks)"),
    rank: int = typer.Option(HarnessDefaults.RANK, "--rank", help="Completion: ground-truth rank"),
    pattern: str = typer.Option("uniform", "--pattern", help="Completion: uniform or tracking"),
    missing: float = typer.Option(0.0, "--missing", help="Missing fraction in [0, 1)"),
    noise: float = typer.Option(0.0, "--noise", help="Completion: noise standard deviation"),
    strict: bool = typer.Option(
        True, "--strict/--no-strict", help="Completion: reject masks with an empty row or column"
    ),
    frames: int = typer.Option(10, "--frames", help="Pose/nrsfm: number of cameras"),
    points: int = typer.Option(50, "--points", help="Pose/nrsfm: number of points"),
    eta: float = typer.Option(0.5, "--eta", help="Pose: object-space/affine mixing weight"),
    projective: bool = typer.Option(False, "--projective", help="Pose: perspective cameras"),
    basis: int = typer.Option(2, "--basis", help="Nrsfm: shape basis size"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show stack traces on errors"),
):
    """
    Generate a synthetic problem directory.

    Completion problems hold M0.csv, M.csv, W.csv and meta.json; pose problems
    an observations CSV plus the ground truth; nrsfm problems the cameras,
    the measurement matrix and the ground-truth shapes.

    Examples:
        bilinrank gen --out inst --pattern tracking --missing 0.3 --seed 4
        bilinrank gen --out scene --scene pose --frames 10 --points 50
    """
    try:
        if scene not in SCENES:
            raise ValidationError(f"Unknown scene '{scene}'. Allowed: {', '.join(SCENES)}")

        if scene == "completion":
            instance = gen_instance(rows, cols, rank, pattern, missing, noise, seed, strict=strict)
            save_instance(instance, out)
            success(
                f"Wrote {rows}x{cols} rank-{rank} instance to {out} "
                f"({instance.meta.missing_realized:.2%} missing)"
            )
        elif scene == "pose":
            pose = gen_pose_scene(frames, points, eta, seed, projective=projective, missing_frac=missing)
            save_pose_scene(pose, out)
            success(f"Wrote pose scene with {pose.op.num_observations} observations to {out}")
        else:
            nrsfm = gen_nrsfm_scene(frames, points, basis, seed)
            save_nrsfm_scene(nrsfm, out)
            success(f"Wrote {frames}-frame non-rigid scene (basis {basis}) to {out}")

        console.print(f"[dim]seed {seed}[/dim]")

    except typer.Exit:
        raise
    except Exception as e:
        handle_error(e, verbose)
        raise typer.Exit(1)
