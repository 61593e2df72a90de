"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import fileio
from .detect import Decision
from .manipulability import Inconclusive, Manipulable, NonManipulable, SolverError
from .manipulability import check as check_manipulability
from .runner import empirical_cdf, ks_two_sample, run_scenario

CONFIG_DIR = Path(__file__).parent / "configs"


def _resolve(path: str) -> Path:
    """Accept a filesystem path or the name of a packaged config."""
    p = Path(path)
    if p.exists():
        return p
    for candidate in (CONFIG_DIR / path, CONFIG_DIR / f"{path}.yaml"):
        if candidate.exists():
            return candidate
    raise click.ClickException(f"no such file or packaged config: {path}")


def _load_scenario(path, n, trials, seed, delta=None):
    cfg = fileio.load_scenario(_resolve(path), seed_override=seed)
    return cfg.override(n=n, trials=trials, delta=delta)


@click.group()
def main():
    """Byzantine-attack simulation, detection and channel auditing for a
    two-relay network with no clean reference."""


@main.command("check-channel")
@click.argument("channel_file")
@click.option("--budget", default=200, show_default=True, help="Witness-search starts.")
@click.option("--seed", default=0, show_default=True, help="Witness-search RNG seed.")
def check_channel(channel_file, budget, seed):
    """Certify or refute non-manipulability of an observation channel."""
    spec = fileio.load_channel(_resolve(channel_file))
    ch = spec.observation_channel()
    try:
        verdict = check_manipulability(ch, budget=budget, rng=np.random.default_rng(seed))
    except SolverError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(2)
    if isinstance(verdict, NonManipulable):
        click.echo(f"NonManipulable (LP optimum {verdict.lp_optimum:.9f})")
    elif isinstance(verdict, Manipulable):
        y1, y2 = verdict.witness
        click.echo(f"Manipulable (witness residual {verdict.residual:.3e})")
        click.echo("witness map, relay 1 (column-stochastic):")
        click.echo(np.array_str(y1.entries, precision=6))
        click.echo("witness map, relay 2 (column-stochastic):")
        click.echo(np.array_str(y2.entries, precision=6))
    else:
        assert isinstance(verdict, Inconclusive)
        click.echo(
            f"Inconclusive (LP optimum {verdict.lp_optimum:.9f}, no witness found; "
            "channel status unknown)"
        )


@main.command()
@click.argument("scenario")
@click.option("--n", type=int, default=None, help="Override sequence length.")
@click.option("--trials", type=int, default=None, help="Override trial count.")
@click.option("--seed", type=int, default=None, help="Override master seed.")
@click.option("--out", type=click.Path(), default=None, help="Trial CSV path.")
def simulate(scenario, n, trials, seed, out):
    """Run a scenario and write one CSV row per trial."""
    cfg = _load_scenario(scenario, n, trials, seed)
    records = run_scenario(cfg)
    out = out or f"{cfg.label}-trials.csv"
    fileio.write_trials(records, out)
    click.echo(f"wrote {len(records)} trials to {out}")


@main.command()
@click.argument("scenario")
@click.option("--n", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="CDF CSV path.")
@click.option("--fig/--no-fig", default=True, show_default=True, help="Render a CDF figure next to the CSV.")
def cdf(scenario, n, trials, seed, out, fig):
    """Empirical CDF of the decision statistic, as CSV plus a figure."""
    cfg = _load_scenario(scenario, n, trials, seed)
    records = run_scenario(cfg)
    stats = [r.statistic for r in records]
    pairs = empirical_cdf(stats)
    out = Path(out or f"{cfg.label}-cdf.csv")
    fileio.write_cdf(pairs, out)
    click.echo(f"wrote {len(pairs)} CDF points to {out}")
    if fig:
        fig_path = out.with_suffix(".png")
        _plot_cdf(pairs, cfg.label, cfg.n, fig_path)
        click.echo(f"wrote figure to {fig_path}")


def _plot_cdf(pairs, label, n, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    values = [v for v, _ in pairs]
    fractions = [f for _, f in pairs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(values, fractions, where="post", label=f"{label}, n={n}")
    ax.set_xlabel("decision statistic")
    ax.set_ylabel("cumulative fraction of trials")
    ax.set_ylim(0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


@main.command()
@click.argument("scenario")
@click.option("--delta", type=float, default=None, help="Override detection threshold.")
@click.option("--n", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="Optional trial CSV path.")
def detect(scenario, delta, n, trials, seed, out):
    """Run a scenario and summarize safe / attack-detected verdicts."""
    cfg = _load_scenario(scenario, n, trials, seed, delta)
    records = run_scenario(cfg)
    detected = sum(r.verdict is Decision.ATTACK_DETECTED for r in records)
    click.echo(
        f"{cfg.label}: {detected}/{len(records)} trials flagged at delta={cfg.delta}"
    )
    if out:
        fileio.write_trials(records, out)
        click.echo(f"wrote trials to {out}")


@main.command()
@click.argument("csv_a", type=click.Path(exists=True))
@click.argument("csv_b", type=click.Path(exists=True))
def ks(csv_a, csv_b):
    """Two-sample KS statistic between the statistics in two trial CSVs."""
    a = [r.statistic for r in fileio.read_trials(csv_a)]
    b = [r.statistic for r in fileio.read_trials(csv_b)]
    click.echo(f"{ks_two_sample(a, b):.6f}")


def entrypoint():
    try:
        main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except (fileio.FileFormatError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except SolverError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(2)
    except click.Abort:
        sys.exit(1)


if __name__ == "__main__":
    entrypoint()
