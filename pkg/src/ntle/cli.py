"""Command-line interface: point evaluation, fitting, sampling, Monte
Carlo campaigns and model comparison.

Exit codes: 0 on success (a non-converged fit is a data outcome, not an
error), 2 for usage or parse problems, 3 for numerical failures.  Values
printed to the terminal carry 12 significant digits; files carry full
round-trip precision.  All randomness sits behind explicit seeds.
"""

from __future__ import annotations

import functools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import analytics, gof
from .dist import NtleParams, mode as dist_mode
from . import dist
from .errors import DatasetError, DomainError, NumericalError, PreconditionError
from .estimation import BayesConfig, EstimationMethod, Sample, fit
from .simulation import load_simulation_config, run_campaign


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def read_dataset(path) -> Sample:
    """Parse a dataset file: one observation per line, or a single-column
    CSV whose first line may be a header.  Offending lines are reported
    by number."""
    text = Path(path).read_text()
    values = []
    seen_any = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip().rstrip(",").strip().strip('"')
        if not token:
            continue
        try:
            val = float(token)
        except ValueError:
            if lineno == 1 and not seen_any:
                continue  # header row
            raise DatasetError(f"line {lineno}: not a number: {raw.strip()!r}")
        seen_any = True
        if not math.isfinite(val) or val <= 0.0:
            raise DatasetError(f"line {lineno}: observations must be finite and > 0, got {raw.strip()!r}")
        values.append(val)
    if not values:
        raise DatasetError(f"{path}: no observations found")
    try:
        return Sample(np.array(values))
    except DomainError as exc:
        raise DatasetError(str(exc))


def _handled(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DomainError, DatasetError, PreconditionError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except NumericalError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)

    return wrapper


def _params_options(fn):
    fn = click.option("--lambda", "lam", type=float, required=True, help="rate > 0")(fn)
    fn = click.option("--beta", type=float, required=True, help="shape > 0")(fn)
    return fn


@click.group()
def main():
    """Transmuted logistic-exponential distribution toolkit."""


EVAL_TARGETS = (
    "pdf",
    "cdf",
    "sf",
    "hazard",
    "quantile",
    "mode",
    "entropy",
    "renyi",
    "moment",
    "mrl",
    "lorenz",
    "stress_strength",
)


@main.command("eval")
@click.argument("what", type=click.Choice(EVAL_TARGETS))
@_params_options
@click.option("--delta", type=float, default=None, help="transmutation weight in (-1, 1)")
@click.option("--y", "ys", type=float, multiple=True, help="evaluation points (pdf/cdf/sf/hazard)")
@click.option("--prob", "probs", type=float, multiple=True, help="probabilities (quantile/lorenz)")
@click.option("--t", "ts", type=float, multiple=True, help="thresholds (mrl)")
@click.option("--k", "ks", type=int, multiple=True, help="moment orders")
@click.option("--order", type=float, default=None, help="entropy order (renyi)")
@click.option("--delta1", type=float, default=None, help="strength delta (stress_strength)")
@click.option("--delta2", type=float, default=None, help="stress delta (stress_strength)")
@click.option("--lambda2", "lam2", type=float, default=None, help="stress rate (defaults to --lambda)")
@click.option("--beta2", type=float, default=None, help="stress shape (defaults to --beta)")
@_handled
def cmd_eval(what, lam, beta, delta, ys, probs, ts, ks, order, delta1, delta2, lam2, beta2):
    """Evaluate distribution quantities at points or configurations."""
    if what == "stress_strength":
        if delta1 is None or delta2 is None:
            raise DomainError("stress_strength needs --delta1 and --delta2")
        strength = NtleParams(lam, beta, delta1)
        stress = NtleParams(lam2 if lam2 is not None else lam, beta2 if beta2 is not None else beta, delta2)
        value = analytics.stress_strength(strength, stress)
        click.echo(f"stress_strength\t{_fmt(value)}")
        return
    if delta is None:
        raise DomainError(f"{what} needs --delta")
    p = NtleParams(lam, beta, delta)
    if what in ("pdf", "cdf", "sf", "hazard"):
        if not ys:
            raise DomainError(f"{what} needs at least one --y")
        fn = {"pdf": dist.pdf, "cdf": dist.cdf, "sf": dist.survival, "hazard": dist.hazard}[what]
        for y in ys:
            click.echo(f"{what}({_fmt(y)})\t{_fmt(fn(p, y))}")
    elif what == "quantile":
        if not probs:
            raise DomainError("quantile needs at least one --prob")
        for q in probs:
            click.echo(f"quantile({_fmt(q)})\t{_fmt(dist.quantile(p, q))}")
    elif what == "mode":
        res = dist_mode(p)
        click.echo(f"mode\t{_fmt(res.location)}\t{res.kind}")
    elif what == "entropy":
        res = analytics.shannon_entropy(p)
        click.echo(f"shannon_entropy\t{_fmt(res.value)}")
    elif what == "renyi":
        if order is None:
            raise DomainError("renyi needs --order")
        if order >= 2 and float(order).is_integer():
            value = analytics.renyi_entropy_integer(p, int(order))
        else:
            value = analytics.renyi_entropy_numeric(p, order)
        click.echo(f"renyi_entropy({_fmt(order)})\t{_fmt(value)}")
    elif what == "moment":
        for k in ks or (1,):
            click.echo(f"moment({k})\t{_fmt(analytics.raw_moment(p, k))}")
    elif what == "mrl":
        if not ts:
            raise DomainError("mrl needs at least one --t")
        for t in ts:
            click.echo(f"mrl({_fmt(t)})\t{_fmt(analytics.mean_residual_life(p, t))}")
    elif what == "lorenz":
        if not probs:
            raise DomainError("lorenz needs at least one --prob")
        for q in probs:
            lor = analytics.lorenz_curve(p, q)
            click.echo(f"lorenz({_fmt(q)})\t{_fmt(lor)}\tbonferroni\t{_fmt(lor / q)}")


def _fit_result_lines(res) -> list[str]:
    lam, beta, delta = res.params.as_tuple()
    lines = [
        f"method\t{res.method.value}",
        f"lambda\t{_fmt(lam)}",
        f"beta\t{_fmt(beta)}",
        f"delta\t{_fmt(delta)}",
        f"objective\t{_fmt(res.objective)}",
        f"converged\t{str(res.converged).lower()}",
        f"iterations\t{res.iterations}",
    ]
    if res.stderr is not None:
        for name, se in zip(("lambda", "beta", "delta"), res.stderr):
            lines.append(f"stderr_{name}\t{_fmt(se)}")
    if res.ci95 is not None:
        for name, (lo, hi) in zip(("lambda", "beta", "delta"), res.ci95):
            lines.append(f"ci95_{name}\t[{_fmt(lo)}, {_fmt(hi)}]")
    for note in res.notes:
        lines.append(f"note\t{note}")
    return lines


def _fit_result_payload(res) -> dict:
    lam, beta, delta = res.params.as_tuple()
    return {
        "method": res.method.value,
        "params": {"lambda": lam, "beta": beta, "delta": delta},
        "objective": res.objective,
        "converged": res.converged,
        "iterations": res.iterations,
        "stderr": None if res.stderr is None else list(res.stderr),
        "ci95": None if res.ci95 is None else [list(c) for c in res.ci95],
        "notes": list(res.notes),
    }


@main.command("fit")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice([m.value for m in EstimationMethod]), default="mle")
@click.option("--json", "as_json", is_flag=True, help="emit the result as JSON")
@click.option("--bayes-iterations", type=int, default=10_000)
@click.option("--bayes-burn-in", type=int, default=2_000)
@click.option("--bayes-prior-shape", type=float, default=1.0, help="Gamma shape for lambda and beta priors")
@click.option("--bayes-prior-rate", type=float, default=0.5, help="Gamma rate for lambda and beta priors")
@click.option("--seed", type=int, default=0, help="chain seed (bayes only)")
@_handled
def cmd_fit(dataset, method, as_json, bayes_iterations, bayes_burn_in, bayes_prior_shape, bayes_prior_rate, seed):
    """Fit the distribution to a dataset by one estimation method."""
    s = read_dataset(dataset)
    bayes = BayesConfig(
        prior_shape_lambda=bayes_prior_shape,
        prior_rate_lambda=bayes_prior_rate,
        prior_shape_beta=bayes_prior_shape,
        prior_rate_beta=bayes_prior_rate,
        iterations=bayes_iterations,
        burn_in=bayes_burn_in,
        seed=seed,
    )
    res = fit(s, method, bayes=bayes)
    if as_json:
        click.echo(json.dumps(_fit_result_payload(res), indent=2, sort_keys=True))
    else:
        click.echo("\n".join(_fit_result_lines(res)))


@main.command("sample")
@_params_options
@click.option("--delta", type=float, required=True)
@click.option("-n", "--size", type=int, required=True, help="number of draws")
@click.option("--seed", type=int, required=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="write one value per line")
@_handled
def cmd_sample(lam, beta, delta, size, seed, output):
    """Draw values by inverse transform with a fixed seed."""
    draws = dist.sample(NtleParams(lam, beta, delta), size, seed)
    if output:
        Path(output).write_text("\n".join(repr(float(v)) for v in draws) + "\n")
        click.echo(f"wrote {size} draws to {output} (seed {seed})")
    else:
        for v in draws:
            click.echo(_fmt(v))


@main.command("simulate")
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", help="report destination")
@click.option("--jobs", type=int, default=1, help="parallel worker processes")
@_handled
def cmd_simulate(config, out_dir, jobs):
    """Run a Monte Carlo campaign from a JSON config file."""
    cfg = load_simulation_config(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = run_campaign(cfg, n_jobs=jobs)
    csv_path = out / "simulation_report.csv"
    json_path = out / "simulation_report.json"
    report.to_csv(csv_path)
    report.to_json(json_path)
    click.echo(f"base_seed\t{cfg.base_seed}")
    click.echo(f"wrote {csv_path} and {json_path}")


@main.command("compare")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--methods", default="mle,mgfe", help="comma-separated estimation methods for the full model")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", help="report destination")
@click.option("--grid-size", type=int, default=200, help="plot-data grid points")
@click.option("--seed", type=int, default=0, help="chain seed when bayes is among the methods")
@_handled
def cmd_compare(dataset, methods, out_dir, grid_size, seed):
    """Fit baselines and the full model, compare fit quality, emit plot data."""
    s = read_dataset(dataset)
    try:
        method_list = [EstimationMethod(tok.strip().lower()) for tok in methods.split(",") if tok.strip()]
    except ValueError as exc:
        raise DomainError(f"unknown estimation method in --methods: {exc}")
    if not method_list:
        raise DomainError("--methods must name at least one estimation method")
    report = gof.compare_models(s, ntle_methods=method_list, bayes=BayesConfig(seed=seed))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.to_json(out / "gof_report.json")
    plot = gof.emit_plot_data(report, s, grid_size)
    plot.to_csv(out / "plot_data.csv")
    plot.hist_to_csv(out / "histogram.csv")
    click.echo(report.to_text())
    click.echo(f"wrote {out / 'gof_report.json'}, {out / 'plot_data.csv'}, {out / 'histogram.csv'}")


if __name__ == "__main__":
    main()
