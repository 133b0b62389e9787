"""Command-line entry point.

Thin wrapper over the core package: consistency checks, weight
derivation, allocation, forecasting, and serving the HTTP API. Exit
codes: 0 pass, 1 invalid input, 2 inconsistent matrix, 3 solver
non-convergence, 4 I/O failure. ``--json`` output reuses the service
response schemas, so machine consumers see one format everywhere.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import ahp
from .allocation import allocate_district
from .api import schemas
from .config import Config, load_config
from .errors import AllocwiseError, ConvergenceError, IntegrityError
from .forecasting import fit_forecaster, forecast as run_forecast
from .store import Store, import_csv, scenario_from_doc

EXIT_PASS = 0
EXIT_INVALID = 1
EXIT_INCONSISTENT = 2
EXIT_NON_CONVERGENT = 3
EXIT_IO = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    raise SystemExit(code)


def _guarded(fn):
    """Run fn, mapping exceptions to the documented exit codes."""
    try:
        return fn()
    except ConvergenceError as exc:
        _fail(EXIT_NON_CONVERGENT, str(exc))
    except (OSError, IntegrityError) as exc:
        _fail(EXIT_IO, str(exc))
    except json.JSONDecodeError as exc:
        _fail(EXIT_INVALID, f"invalid JSON: {exc}")
    except AllocwiseError as exc:
        _fail(EXIT_INVALID, str(exc))
    except ValueError as exc:
        _fail(EXIT_INVALID, str(exc))


def _load_config(ctx, **overrides) -> Config:
    return load_config(ctx.obj.get("config_path"), overrides=overrides)


def _read_matrix(path: str) -> ahp.JudgmentMatrix:
    text = Path(path).read_text(encoding="utf-8")
    return ahp.JudgmentMatrix.from_json(text)


def _analyze_file(
    path: str, config: Config, strict_scale: bool = False
):
    m = _read_matrix(path)
    report = ahp.validate_matrix(m, strict_scale=strict_scale)
    if not report.is_valid:
        from .errors import InvalidMatrixError

        raise InvalidMatrixError(
            "; ".join(report.error_messages()), report=report
        )
    weights, consistency = ahp.analyze(
        m,
        tol=config.solver_tol,
        max_iter=config.solver_max_iter,
        ri_table=config.ri_table,
    )
    response = schemas.AnalyzeResponse(
        criteria=list(m.criteria or ()),
        weights=weights.tolist(),
        consistency=schemas.ConsistencyBody(**consistency.to_dict()),
        warnings=report.warning_messages(),
    )
    return m, response


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(),
    default=None,
    help="Path to an allocwise.toml (default: ./allocwise.toml if present).",
)
@click.pass_context
def main(ctx, config_path):
    """Multi-criteria resource allocation planner."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@main.command()
@click.argument("matrix_file", type=click.Path())
@click.option("--strict-scale", is_flag=True, help="Treat scale/reciprocity findings as errors.")
@click.option("--tol", type=float, default=None, help="Eigensolver tolerance override.")
@click.option("--max-iter", type=int, default=None, help="Eigensolver iteration cap override.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def check(ctx, matrix_file, strict_scale, tol, max_iter, as_json):
    """Run the consistency test on a judgment matrix JSON file.

    Exits 0 when CR < 0.1, 2 when the matrix is inconsistent.
    """

    def run():
        config = _load_config(ctx, solver_tol=tol, solver_max_iter=max_iter)
        _m, response = _analyze_file(matrix_file, config, strict_scale)
        if as_json:
            click.echo(response.model_dump_json())
        else:
            c = response.consistency
            click.echo(f"order:      {len(response.weights)}")
            click.echo(f"lambda_max: {c.lambda_max:.10g}")
            click.echo(f"CI:         {c.ci:.10g}")
            click.echo(f"RI:         {c.ri:.10g}")
            click.echo(f"CR:         {c.cr:.10g}")
            click.echo(f"passes:     {'yes' if c.passes else 'no'}")
            for w in response.warnings:
                click.echo(f"warning: {w}", err=True)
        return response

    response = _guarded(run)
    raise SystemExit(EXIT_PASS if response.consistency.passes else EXIT_INCONSISTENT)


@main.command()
@click.argument("matrix_file", type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def weights(ctx, matrix_file, as_json):
    """Derive normalized criterion weights from a judgment matrix."""

    def run():
        config = _load_config(ctx)
        _m, response = _analyze_file(matrix_file, config)
        if as_json:
            click.echo(response.model_dump_json())
        else:
            for name, w in zip(response.criteria, response.weights):
                click.echo(f"{name:8s} {w:.10f}")
            if not response.consistency.passes:
                click.echo(
                    f"warning: matrix fails the consistency test "
                    f"(CR = {response.consistency.cr:.4f})",
                    err=True,
                )

    _guarded(run)
    raise SystemExit(EXIT_PASS)


@main.command()
@click.argument("scenario_ref")
@click.option("--penalty-rate", type=float, default=None, help="Override the scenario's penalty rate.")
@click.option("--store", "store_dir", type=click.Path(), default=None, help="Store directory.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def allocate(ctx, scenario_ref, penalty_rate, store_dir, as_json):
    """Allocate a district given a scenario JSON file or stored id."""

    def run():
        config = _load_config(ctx, store_dir=store_dir)
        scenario_id = None
        if Path(scenario_ref).is_file():
            doc = json.loads(Path(scenario_ref).read_text(encoding="utf-8"))
            doc.setdefault("id", "ad-hoc")
            doc.setdefault("district", "ad-hoc")
            s = scenario_from_doc(doc)
        else:
            store = Store(config.store_dir)
            store.ensure_bundled()
            s = store.load_scenario(scenario_ref)
            scenario_id = s.id
        if s.weights is not None:
            wv = s.weights
        else:
            wv, _ = ahp.analyze(
                s.matrix,
                tol=config.solver_tol,
                max_iter=config.solver_max_iter,
                ri_table=config.ri_table,
            )
        rate = penalty_rate if penalty_rate is not None else s.penalty_rate
        result = allocate_district(wv, s.tiers, penalty_rate=rate)
        response = schemas.AllocateResponse(
            scenario_id=scenario_id, district=s.district, **result.to_dict()
        )
        if as_json:
            click.echo(response.model_dump_json())
        else:
            click.echo(f"district: {response.district}")
            for kind in ("CenH", "ComH", "HC"):
                click.echo(
                    f"{kind:5s} raw {response.raw_index[kind]: .6f}  "
                    f"penalized {response.penalized_index[kind]: .6f}  "
                    f"ratio {response.ratio[kind]:.1f}"
                )
            triple = ":".join(
                f"{response.ratio[k]:.1f}" for k in ("CenH", "ComH", "HC")
            )
            total = sum(response.ratio.values())
            click.echo(f"ratio CenH:ComH:HC = {triple} (sum {total:.1f})")
            for w in response.warnings:
                click.echo(f"warning: {w}", err=True)

    _guarded(run)
    raise SystemExit(EXIT_PASS)


@main.command()
@click.argument("series_csv", type=click.Path())
@click.option("--horizon", type=int, default=90, show_default=True, help="Days to forecast.")
@click.option("--seed", type=int, default=0, show_default=True, help="Training seed.")
@click.option("--epochs", type=int, default=None, help="Training epochs.")
@click.option("--lookback", type=int, default=None, help="Input window length.")
@click.option("--hidden-size", type=int, default=None, help="LSTM hidden units.")
@click.option("--out", "out_file", type=click.Path(), default=None,
              help="Plot-data CSV path (default: <input>-forecast.csv).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def forecast(ctx, series_csv, horizon, seed, epochs, lookback, hidden_size,
             out_file, as_json):
    """Train on a date,cumulative CSV and print the forecast.

    Prints the forecast as two-column CSV and writes a plot-data file
    holding history plus forecast for external plotting tools.
    """

    def run():
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        ds = import_csv(series_csv, "time_series")
        series = ds.payload
        kwargs = {"seed": seed}
        if epochs is not None:
            kwargs["epochs"] = epochs
        if lookback is not None:
            kwargs["lookback"] = lookback
        if hidden_size is not None:
            kwargs["hidden_size"] = hidden_size
        model, loss_curve = fit_forecaster(series, **kwargs)
        out = run_forecast(model, series, horizon=horizon)

        response = schemas.ForecastResponse(
            dataset_id=ds.id,
            horizon=horizon,
            seed=seed,
            last_observed_date=series.dates[-1].isoformat(),
            last_observed_value=float(series.values[-1]),
            dates=[d.isoformat() for d in out.dates],
            values=[float(v) for v in out.values],
            loss_curve=[float(x) for x in loss_curve],
        )
        if as_json:
            click.echo(response.model_dump_json())
        else:
            click.echo("date,cumulative")
            for d, v in zip(response.dates, response.values):
                click.echo(f"{d},{v!r}")

        plot_path = Path(out_file) if out_file else Path(
            str(Path(series_csv).with_suffix("")) + "-forecast.csv"
        )
        lines = ["date,cumulative"]
        lines += [
            f"{d.isoformat()},{float(v)!r}"
            for d, v in zip(series.dates, series.values)
        ]
        lines += [f"{d},{v!r}" for d, v in zip(response.dates, response.values)]
        plot_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        click.echo(f"wrote {plot_path}", err=True)

    _guarded(run)
    raise SystemExit(EXIT_PASS)


@main.command()
@click.option("--host", default=None, help="Bind address.")
@click.option("--port", type=int, default=None, help="Bind port.")
@click.option("--store", "store_dir", type=click.Path(), default=None, help="Store directory.")
@click.option("--cors-origin", "cors_origins", multiple=True, help="Allowed CORS origin (repeatable).")
@click.pass_context
def serve(ctx, host, port, store_dir, cors_origins):
    """Run the HTTP API."""
    import uvicorn

    from .api import create_app

    def run():
        config = _load_config(
            ctx,
            host=host,
            port=port,
            store_dir=store_dir,
            cors_origins=tuple(cors_origins) or None,
        )
        app = create_app(config)
        uvicorn.run(app, host=config.host, port=config.port)

    _guarded(run)


if __name__ == "__main__":
    main()
