"""Command-line front end: run scenarios, list them, validate configs."""

from __future__ import annotations

import os
import sys

import click
import yaml

from .errors import ConfigError
from .reports import emit
from .scenarios import (
    BUILTIN_SCENARIOS,
    run_scenario,
    scenario_from_config,
)

OUT_ENV = "EULERTUBE_OUT"


def _load_target(target: str):
    """Resolve a scenario name or a config file path into a run target."""
    if target in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[target]
    if os.path.exists(target):
        try:
            with open(target) as fh:
                config = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"could not parse {target}: {exc}") from exc
        return scenario_from_config(config)
    raise ConfigError(f"no such scenario or config file: {target!r}")


@click.group()
def main():
    """Verify tubular embeddings against normal exponential maps."""


@main.command()
@click.argument("targets", nargs=-1, required=True)
@click.option("--tol", type=float, default=None, help="Override every stage tolerance.")
@click.option("--samples", type=int, default=None, help="Parameter samples per stage.")
@click.option("--out", default=None, help="Report file (relative paths land in $%s)." % OUT_ENV)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["table", "records"]),
    default="table",
    show_default=True,
)
def run(targets, tol, samples, out, fmt):
    """Run one or more scenarios (built-in names or config file paths)."""
    from dataclasses import replace

    reports = []
    for target in targets:
        try:
            scn = _load_target(target)
        except ConfigError as exc:
            raise click.ClickException(str(exc))
        if tol is not None:
            if tol <= 0:
                raise click.ClickException("--tol must be positive")
            over = {k: tol for k in ("embedding", "chi", "pullback", "diagram",
                                     "isometry", "euler-like", "reconstruction",
                                     "point-case")}
            scn = replace(scn, tolerances={**scn.tolerances, **over})
        if samples is not None:
            if samples <= 0:
                raise click.ClickException("--samples must be positive")
            scn = replace(scn, samples={**scn.samples, "grid": samples, "diagram_u": samples})
        reports.extend(run_scenario(scn))
    path = None
    if out is not None:
        base = os.environ.get(OUT_ENV, "")
        path = out if os.path.isabs(out) or not base else os.path.join(base, out)
    text = emit(reports, fmt=fmt, path=path)
    click.echo(text, nl=False)
    if not all(r.passed for r in reports):
        sys.exit(1)


@main.command("list")
def list_():
    """List built-in scenario names."""
    for name in BUILTIN_SCENARIOS:
        click.echo(name)


@main.command()
@click.argument("path", type=click.Path(exists=True))
def check(path):
    """Validate a scenario config file without running it."""
    try:
        with open(path) as fh:
            config = yaml.safe_load(fh)
        scn = scenario_from_config(config)
    except (ConfigError, yaml.YAMLError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"ok: {scn.name}")


if __name__ == "__main__":
    main()
