import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np

from complexes.HodgeDecomposition import (
    abstract_divcurl_identity,
    harmonic_dimension,
    hodge_decompose,
)
from complexes.RefinementReport import RefinementReport, refinement_diagnostics
from complexes.ShortSequence import ShortSequence, validate_sequence
from database.ResultsDatabase import ResultsDatabase
from divcurl.ConvergenceTable import ConvergenceTable, fit_decay_slope
from divcurl.CounterexampleExperiment import run_counterexample
from divcurl.FriedrichsCheck import friedrichs_check
from divcurl.OscillatoryFamily import OscillatoryFamily
from divcurl.PositiveExperiment import DEFAULT_U, DEFAULT_V, run_positive
from divcurl.ProjectionExperiment import DEFAULT_FAMILY, projection_convergence
from errors import DivCurlError
from grids.GridSpec import GridSpec
from grids.builders import build_derham, build_gradgrad
from linops.LinearMap import adjoint
from linops.MatrixMarket import export_projectors, export_sequence, import_sequence
from linops.WeightedSVD import weighted_svd
from .RunConfig import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    summary: str
    tables: list[ConvergenceTable] = field(default_factory=list)
    report: Optional[RefinementReport] = None
    files: list[Path] = field(default_factory=list)


def report_error(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _grid(config: RunConfig) -> GridSpec:
    assert config.grid is not None
    return config.grid


def _sequence(config: RunConfig) -> ShortSequence:
    if config.input is not None:
        A0, A1 = import_sequence(config.input)
        return validate_sequence(A0, A1, label="imported")
    return build_derham(_grid(config))


def _family(config: RunConfig, name: str, default: Dict[str, list]) -> OscillatoryFamily:
    spec = config.families.get(name, default)
    return OscillatoryFamily.from_strings(
        spec["macro"], spec["micro"], config.frequencies, _grid(config).d
    )


def export_operators(config: RunConfig) -> list[Path]:
    """Write A0, A1 and the grams of the configured de Rham complex to config.out"""
    return export_sequence(build_derham(_grid(config)), config.out)


def _check_complex(config: RunConfig) -> RunResult:
    S = _sequence(config)
    return RunResult(f"residual={S.residual:.17g}")


def _betti(config: RunConfig) -> RunResult:
    return RunResult(f"harmonic_dim={harmonic_dimension(_sequence(config), rtol=config.tol)}")


def _hodge(config: RunConfig) -> RunResult:
    S = _sequence(config)
    decomposition = hodge_decompose(S, rtol=config.tol)
    files = export_projectors(decomposition, config.out)
    rng = np.random.default_rng(config.seed)
    u, v = rng.standard_normal((2, S.H1.dim))
    defect = abstract_divcurl_identity(decomposition, u, v)
    return RunResult(
        f"harmonic_dim={decomposition.harmonic_dim} "
        f"exact_rank={decomposition.p_exact.rank} "
        f"coexact_rank={decomposition.p_coexact.rank} "
        f"identity_defect={defect:.3e}",
        files=files,
    )


def _poincare(config: RunConfig) -> RunResult:
    grid = _grid(config)
    if config.resolutions:
        report = refinement_diagnostics(
            lambda N: build_derham(grid.with_resolution(N)), config.resolutions, rtol=config.tol
        )
        path = report.to_csv(config.out / "refinement.csv")
        last = report.levels[-1]
        return RunResult(
            f"poincare_A0={last.poincare_A0:.17g} poincare_A1star={last.poincare_A1star:.17g} "
            f"harmonic_dims={','.join(map(str, report.harmonic_dims))} stable={report.is_stable()}",
            report=report,
            files=[path],
        )
    S = build_derham(grid)
    c0 = weighted_svd(S.A0, rtol=config.tol, vectors=False).poincare
    c1 = weighted_svd(adjoint(S.A1), rtol=config.tol, vectors=False).poincare
    return RunResult(f"poincare_A0={c0:.17g} poincare_A1star={c1:.17g}")


def _divcurl(config: RunConfig) -> RunResult:
    u = _family(config, "u", DEFAULT_U)
    v = _family(config, "v", DEFAULT_V)
    tables = run_positive(u, v, [_grid(config)])
    path = tables[0].to_csv(config.out / "divcurl.csv")
    table = tables[0]
    return RunResult(
        f"max_error={table.max_error:.3e} "
        f"max_res_div={max(r.res_div for r in table.rows):.3e} "
        f"max_res_curl={max(r.res_curl for r in table.rows):.3e} "
        f"max_weak_gap={table.max_weak_gap:.3e} "
        f"max_local_error={table.max_local_error:.3e}",
        tables=tables,
        files=[path],
    )


def _counterexample(config: RunConfig) -> RunResult:
    tables = run_counterexample([_grid(config)], config.frequencies)
    table = tables[0]
    path = table.to_csv(config.out / "counterexample.csv")
    growth = [r.res_div for r in table.rows]
    slope = fit_decay_slope(table.ks, growth)
    return RunResult(
        f"min_gap={min(table.errors):.17g} "
        f"max_weak_gap={table.max_weak_gap:.3e} "
        f"max_local_error={table.max_local_error:.17g} "
        f"res_div_slope={slope if slope is None else round(slope, 6)}",
        tables=tables,
        files=[path],
    )


def _projection(config: RunConfig) -> RunResult:
    grid = _grid(config)
    table = projection_convergence(
        build_derham(grid), _family(config, "field", DEFAULT_FAMILY), grid, rtol=config.tol
    )
    path = table.to_csv(config.out / "projection.csv")
    return RunResult(f"max_projection_error={table.max_error:.3e}", files=[path])


def _friedrichs(config: RunConfig) -> RunResult:
    report = friedrichs_check(_grid(config), samples=config.samples, seed=config.seed)
    return RunResult(f"max_relative_residual={report.max_relative_residual:.3e}")


def _gradgrad(config: RunConfig) -> RunResult:
    sequences = build_gradgrad(_grid(config))
    residuals = ",".join(f"{S.residual:.3e}" for S in sequences)
    dims = ",".join(str(harmonic_dimension(S, rtol=config.tol)) for S in sequences)
    return RunResult(f"residuals={residuals} harmonic_dims={dims}")


def _export(config: RunConfig) -> RunResult:
    files = export_operators(config)
    return RunResult(f"wrote {len(files)} files to {config.out}", files=files)


HANDLERS: Dict[str, Callable[[RunConfig], RunResult]] = {
    "check-complex": _check_complex,
    "hodge": _hodge,
    "betti": _betti,
    "poincare": _poincare,
    "divcurl": _divcurl,
    "counterexample": _counterexample,
    "projection": _projection,
    "friedrichs": _friedrichs,
    "gradgrad": _gradgrad,
    "export": _export,
}


def _record(config: RunConfig, result: RunResult) -> None:
    assert config.db_path is not None
    database = ResultsDatabase(str(config.db_path))
    run_id = database.store_run(config.command, config.to_dict(), result.summary)
    if not run_id:
        logger.error(f"Run was not recorded in {config.db_path}; skipping its tables")
        return
    for table in result.tables:
        database.store_convergence_table(run_id, table)
    if result.report is not None:
        database.store_refinement_report(run_id, result.report)


def execute(config: RunConfig) -> int:
    """
    Run one command, print its summary and return the exit code.

    Args:
        config: Validated configuration

    Returns:
        0 on success, 1 for validation or I/O failures, 2 for numerical failures
    """
    logger.info(f"Running {config.command}")
    try:
        result = HANDLERS[config.command](config)
        if config.db_path is not None:
            _record(config, result)
    except DivCurlError as e:
        report_error(e.to_dict())
        return e.exit_code
    except OSError as e:
        report_error(
            {
                "error": "IO",
                "message": e.strerror or str(e),
                "details": {"path": str(e.filename) if e.filename else None},
            }
        )
        return 1
    for path in result.files:
        logger.info(f"Wrote {path}")
    print(result.summary)
    return 0
