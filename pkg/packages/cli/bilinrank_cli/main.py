"""bilinrank CLI - Main entry point."""

import typer
from bilinrank_common import EnvVars, configure_logging

from . import certify_cmd, experiment_cmd, gen_cmd, info_cmd, replay_cmd, solve_cmd

app = typer.Typer(
    name="bilinrank",
    help="bilinrank CLI - Low-rank matrix recovery with concave singular-value penalties",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main_callback(
    log_level: str = typer.Option(
        "warning", "--log-level", envvar=EnvVars.LOG_LEVEL, help="debug, info, warning or error"
    ),
):
    configure_logging(log_level)


# Problems and single solves
app.command(name="gen")(gen_cmd.gen)
app.command(name="solve")(solve_cmd.solve_command)
app.command(name="admm")(solve_cmd.admm_command)
app.command(name="certify")(certify_cmd.certify_command)

# Experiments
app.command(name="table1")(experiment_cmd.table1)
app.command(name="sweep")(experiment_cmd.sweep)
app.command(name="bias")(experiment_cmd.bias)
app.command(name="pose")(experiment_cmd.pose)
app.command(name="nrsfm")(experiment_cmd.nrsfm)
app.command(name="replay")(replay_cmd.replay_command)

app.command(name="version")(info_cmd.version)


def main():
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
