from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Iterator, List, Optional

import pandas as pd
import typer

from greencone.config import Config, ProblemConfig
from greencone.corpus import get_entry, names, run_corpus
from greencone.model.models import BvpSolution, RunReport
from greencone.pipeline import EXIT_CONFIG, ProblemRun, exit_code_for
from greencone.utils import constants
from greencone.utils.errors import ConfigError, GreenConeError
from greencone.utils.output_format import OutputFormatType
from greencone.utils.pretty import RichLog

app = typer.Typer(help="Cone fixed-point toolkit for (k, n-k) boundary value problems",
                  pretty_exceptions_enable=False,
                  pretty_exceptions_show_locals=False, add_completion=False)

ConfigOption = Annotated[
    Optional[Path],
    typer.Option("--config", help="Path to a problem TOML file.", show_default=False),
]
CorpusOption = Annotated[
    Optional[str],
    typer.Option("--corpus", help="Name of a built-in corpus entry.", show_default=False),
]
OutOption = Annotated[
    Path,
    typer.Option("--out", help="Directory the report and tables are written to."),
]
FormatOption = Annotated[
    OutputFormatType,
    typer.Option("--format", help="Output format type."),
]
TolOption = Annotated[
    Optional[float],
    typer.Option("--tol", help="Tolerance override (quadrature for constants/check, solver for solve).",
                 show_default=False),
]


@app.callback()
def main(
        debug: Annotated[bool, typer.Option("--debug", help="Log at DEBUG level.")] = False,
        settings: Annotated[
            Optional[Path],
            typer.Option("--settings", help="TOML file with quadrature/envelope/hypotheses/solver settings.",
                         show_default=False),
        ] = None,
) -> None:
    """Handles the global options"""
    if debug:
        RichLog.activate_debug()
    Config.reset()
    try:
        Config(settings)
    except ConfigError as exc:
        RichLog.error(str(exc))
        raise typer.Exit(EXIT_CONFIG)


@contextmanager
def _guard() -> Iterator[None]:
    """Turns library failures into the documented exit codes."""
    try:
        yield
    except GreenConeError as exc:
        RichLog.error(f"{type(exc).__name__}: {exc}")
        raise typer.Exit(exit_code_for(exc))


def _load(config: Optional[Path], corpus: Optional[str]) -> ProblemConfig:
    if (config is None) == (corpus is None):
        raise ConfigError("give exactly one of --config and --corpus")
    return get_entry(corpus) if corpus is not None else ProblemConfig.load(config)


def _write_report(report: RunReport, out: Path, name: str = "report.json") -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    RichLog.info(f"report written to {path}")
    return path


def _solution_table(solution: BvpSolution) -> pd.DataFrame:
    return pd.DataFrame({"t": solution.nodes, "u": solution.values})


@app.command()
def envelope(
        config: ConfigOption = None,
        corpus: CorpusOption = None,
        grid: Annotated[int, typer.Option("--grid", help="Grid points per axis.", min=2)] = 101,
        t0: Annotated[Optional[float], typer.Option("--t0", help="Sample the section t = t0.",
                                                    show_default=False)] = None,
        s0: Annotated[Optional[float], typer.Option("--s0", help="Sample the section s = s0.",
                                                    show_default=False)] = None,
        out: OutOption = constants.OUTPUT_FOLDER,
        output_format: FormatOption = OutputFormatType.CSV,
):
    """Samples the normalized kernel and its bounds k1, k2."""
    with _guard():
        if t0 is not None and s0 is not None:
            raise ConfigError("give at most one of --t0 and --s0")
        run = ProblemRun(_load(config, corpus))
        table = run.envelope_table(grid=grid, t0=t0, s0=s0)
        env = run.envelope
        RichLog.info(f"K1={env.K1:.9g}, K2={env.K2:.9g}, m1={env.m1:.9g}, I1=[{env.a1:.6g}, {env.b1:.6g}]")
        output_format.write_table(table, out, "envelope")
        _write_report(run.report(), out)


@app.command(name="constants")
def constants_(
        config: ConfigOption = None,
        corpus: CorpusOption = None,
        tol: TolOption = None,
        out: OutOption = constants.OUTPUT_FOLDER,
        output_format: FormatOption = OutputFormatType.JSON,
):
    """Computes the weight integrals and the hypothesis coefficients."""
    with _guard():
        run = ProblemRun(_load(config, corpus), quadrature_tol=tol)
        c = run.constants
        output_format.write_table(pd.DataFrame([c.model_dump()]), out, "constants")
        _write_report(run.report(), out)


@app.command()
def check(
        config: ConfigOption = None,
        corpus: CorpusOption = None,
        tol: TolOption = None,
        out: OutOption = constants.OUTPUT_FOLDER,
        output_format: FormatOption = OutputFormatType.JSON,
):
    """Checks the hypotheses of the selected theorem; exits 0 iff they hold."""
    with _guard():
        run = ProblemRun(_load(config, corpus), quadrature_tol=tol)
        run.check()
        report = run.report()
        rows = [h.model_dump(mode="json") for h in report.hypotheses]
        output_format.write_table(pd.DataFrame(rows), out, "hypotheses")
        _write_report(report, out)
    for h in report.hypotheses:
        RichLog.verdict(h.hypothesis.value, h.passed, f"margin {h.margin:.6g}")
    raise typer.Exit(report.exit_code)


@app.command()
def solve(
        config: ConfigOption = None,
        corpus: CorpusOption = None,
        tol: TolOption = None,
        grid: Annotated[Optional[int], typer.Option("--grid", help="Solver node count override.",
                                                    show_default=False)] = None,
        out: OutOption = constants.OUTPUT_FOLDER,
):
    """Checks the hypotheses, finds the fixed points and certifies their localization."""
    with _guard():
        run = ProblemRun(_load(config, corpus), solver_tol=tol, nodes=grid, show_progress=True)
        run.check()
        certificate = run.solve()
        report = run.report()
        for i, solution in enumerate(certificate.solutions):
            OutputFormatType.CSV.write_table(_solution_table(solution), out, f"solution_{i}")
        _write_report(report, out)
    RichLog.info(f"{len(certificate.solutions)} solution(s), certificate {certificate.verdict.value}")
    raise typer.Exit(report.exit_code)


@app.command()
def corpus(
        run: Annotated[str, typer.Option("--run", help="Pipeline to run on every entry: check or solve.")] = "check",
        entries: Annotated[
            Optional[List[str]],
            typer.Option("--corpus", help="Restrict to these entries (repeatable).", show_default=False),
        ] = None,
        workers: Annotated[int, typer.Option("--workers", help="Parallel ray workers.", min=1)] = 1,
        out: OutOption = constants.OUTPUT_FOLDER,
):
    """Runs the built-in corpus and writes one report per entry plus a summary."""
    with _guard():
        selected = entries or names()
        for name in selected:
            get_entry(name)
        if run not in ("check", "solve"):
            raise ConfigError(f"--run must be check or solve, got '{run}'")
        settings = Config().conf_file
        outcomes = run_corpus(selected, command=run, workers=workers,
                              settings=None if settings is None else str(settings))
    rows = []
    for outcome in outcomes:
        if outcome.report is not None:
            _write_report(outcome.report, out / outcome.name)
        else:
            RichLog.error(f"{outcome.name}: {outcome.error}")
        RichLog.verdict(outcome.name, outcome.exit_code == 0, f"exit {outcome.exit_code}")
        rows.append({"name": outcome.name, "exit_code": outcome.exit_code, "error": outcome.error or ""})
    OutputFormatType.CSV.write_table(pd.DataFrame(rows), out, "summary")
    raise typer.Exit(max(row["exit_code"] for row in rows))


if __name__ == "__main__":
    app()
