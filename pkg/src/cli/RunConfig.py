"""
Run configuration from a JSON file and command-line flags.

Flags override file values. Every problem found is collected and reported
in one ConfigError.
"""

import argparse
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence

from errors import ConfigError, DivCurlError
from grids.GridSpec import GridSpec, puncture
from linops.WeightedSVD import RANK_RTOL

COMMANDS = (
    "check-complex",
    "hodge",
    "betti",
    "poincare",
    "divcurl",
    "counterexample",
    "projection",
    "friedrichs",
    "gradgrad",
    "export",
)
EXPERIMENTS = {
    "positive": "divcurl",
    "counterexample": "counterexample",
    "projection": "projection",
    "friedrichs": "friedrichs",
}
IMPORTABLE = ("check-complex", "betti", "hodge")
FILE_KEYS = {
    "command",
    "experiment",
    "grid",
    "hole",
    "frequencies",
    "family",
    "tol",
    "out",
    "input",
    "resolutions",
    "seed",
    "samples",
    "db",
    "log_level",
}
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
DEFAULT_FREQUENCIES = (2, 4, 8, 16)

FamilySpec = Dict[str, list]


@dataclass(frozen=True)
class RunConfig:
    command: str
    grid: Optional[GridSpec] = None
    frequencies: tuple[int, ...] = DEFAULT_FREQUENCIES
    families: Dict[str, FamilySpec] = field(default_factory=dict)
    tol: float = RANK_RTOL
    out: Path = Path("results")
    input: Optional[Path] = None
    resolutions: tuple[int, ...] = ()
    seed: int = 0
    samples: int = 100
    db_path: Optional[Path] = None
    log_level: str = "WARNING"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "grid": self.grid.to_dict() if self.grid else None,
            "frequencies": list(self.frequencies),
            "families": self.families,
            "tol": self.tol,
            "out": str(self.out),
            "input": str(self.input) if self.input else None,
            "resolutions": list(self.resolutions),
            "seed": self.seed,
            "samples": self.samples,
        }


class ConfigArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ConfigError(f"invalid command line: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = ConfigArgumentParser(
        prog="divcurl", description="Discrete Hilbert complexes and div-curl experiments"
    )
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--command", help=f"one of {', '.join(COMMANDS)}")
    parser.add_argument("--d", type=int, help="grid dimension")
    parser.add_argument("--N", type=int, help="cells per axis")
    parser.add_argument("--L", type=float, help="axis length")
    parser.add_argument("--bc", help="periodic or dirichlet")
    parser.add_argument("--hole", help="hole corners x0,y0,x1,y1 in cell coordinates")
    parser.add_argument("--frequencies", help="comma-separated frequencies, e.g. 2,4,8")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--tol", type=float, help="relative rank tolerance")
    parser.add_argument("--input", type=Path, help="directory with A0.mtx and A1.mtx")
    parser.add_argument("--resolutions", help="comma-separated N for refinement reports")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--samples", type=int, help="random fields for friedrichs")
    parser.add_argument("--db", type=Path, help="SQLite run ledger")
    parser.add_argument("--log-level", dest="log_level", help="logging level")
    return parser


def _int_list(value: Any, name: str, problems: list[str]) -> Optional[tuple[int, ...]]:
    if value is None:
        return None
    try:
        if isinstance(value, str):
            items = [int(v) for v in value.split(",") if v.strip()]
        else:
            items = [int(v) for v in value]
    except (TypeError, ValueError):
        problems.append(f"{name} must be a list of integers, got {value!r}")
        return None
    return tuple(items)


def _load_file(path: Path) -> Dict[str, Any]:
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}", path=str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path}:{e.lineno}:{e.colno}: {e.msg}", path=str(path), line=e.lineno, column=e.colno
        ) from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _families(value: Any, problems: list[str]) -> Dict[str, FamilySpec]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        problems.append("family must be an object")
        return {}
    named = {"field": value} if "macro" in value or "micro" in value else value
    families: Dict[str, FamilySpec] = {}
    for name, spec in named.items():
        if name not in ("u", "v", "field"):
            problems.append(f"unknown family {name!r}")
            continue
        if not isinstance(spec, dict) or set(spec) != {"macro", "micro"}:
            problems.append(f"family {name!r} needs exactly the keys 'macro' and 'micro'")
            continue
        macro, micro = spec["macro"], spec["micro"]
        if not all(isinstance(p, list) and all(isinstance(s, str) for s in p) for p in (macro, micro)):
            problems.append(f"family {name!r}: macro and micro must be lists of strings")
        elif len(macro) != len(micro):
            problems.append(f"family {name!r}: macro and micro differ in length")
        else:
            families[name] = {"macro": list(macro), "micro": list(micro)}
    return families


def _grid(
    data: Mapping[str, Any], args: argparse.Namespace, problems: list[str]
) -> Optional[GridSpec]:
    raw = data.get("grid")
    if raw is not None and not isinstance(raw, dict):
        problems.append("grid must be an object")
        return None
    grid = dict(raw or {})
    for key in ("d", "N", "L", "bc"):
        flag = getattr(args, key)
        if flag is not None:
            grid[key] = flag
    if not grid:
        return None
    try:
        spec = GridSpec.from_dict(grid)
    except DivCurlError as e:
        problems.extend(e.details.get("problems") or [e.message])
        return None
    hole = _int_list(args.hole if args.hole is not None else data.get("hole"), "hole", problems)
    if hole is None:
        return spec
    if len(hole) != 2 * spec.d:
        problems.append(f"hole needs {2 * spec.d} integers for d={spec.d}, got {len(hole)}")
        return None
    try:
        return puncture(spec, hole[: spec.d], hole[spec.d :])
    except DivCurlError as e:
        problems.append(e.message)
        return None


def parse_config(
    argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None
) -> RunConfig:
    """
    Build a validated RunConfig.

    Args:
        argv: Command-line arguments, sys.argv[1:] when None
        environ: Environment for DIVCURL_LOG_LEVEL and DIVCURL_DB, os.environ when None

    Returns:
        RunConfig: Validated configuration
    """
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    data = _load_file(args.config) if args.config else {}
    problems = [f"unknown key {key!r}" for key in sorted(set(data) - FILE_KEYS)]

    command = args.command or data.get("command")
    experiment = data.get("experiment")
    if command is None and experiment is not None:
        command = EXPERIMENTS.get(experiment)
        if command is None:
            problems.append(f"unknown experiment {experiment!r}")
    if command is None:
        if experiment is None:
            problems.append("missing command")
    elif command not in COMMANDS:
        problems.append(f"unknown command {command!r}")

    known = len(problems)
    grid = _grid(data, args, problems)
    grid_rejected = len(problems) > known
    input_dir = args.input or (Path(data["input"]) if data.get("input") else None)
    imported = command in IMPORTABLE and input_dir is not None
    if grid is None and not grid_rejected and not imported:
        problems.append("missing grid")

    frequencies = _int_list(
        args.frequencies if args.frequencies is not None else data.get("frequencies"),
        "frequencies",
        problems,
    )
    if frequencies is not None and (not frequencies or min(frequencies) <= 0):
        problems.append("frequencies must be positive")
    resolutions = _int_list(
        args.resolutions if args.resolutions is not None else data.get("resolutions"),
        "resolutions",
        problems,
    )

    tol = args.tol if args.tol is not None else data.get("tol", RANK_RTOL)
    if not isinstance(tol, (int, float)) or tol <= 0:
        problems.append(f"tol must be positive, got {tol!r}")
    samples = args.samples if args.samples is not None else data.get("samples", 100)
    if not isinstance(samples, int) or samples <= 0:
        problems.append(f"samples must be a positive integer, got {samples!r}")
    seed = args.seed if args.seed is not None else data.get("seed", 0)
    if not isinstance(seed, int):
        problems.append(f"seed must be an integer, got {seed!r}")

    log_level = str(
        args.log_level or data.get("log_level") or environ.get("DIVCURL_LOG_LEVEL") or "WARNING"
    ).upper()
    if log_level not in LOG_LEVELS:
        problems.append(f"log level must be one of {LOG_LEVELS}, got {log_level!r}")
    db = args.db or data.get("db") or environ.get("DIVCURL_DB")
    families = _families(data.get("family"), problems)

    if problems:
        raise ConfigError("invalid configuration", problems)
    return RunConfig(
        command=command,
        grid=grid,
        frequencies=tuple(sorted(set(frequencies))) if frequencies else DEFAULT_FREQUENCIES,
        families=families,
        tol=float(tol),
        out=args.out or Path(data.get("out", "results")),
        input=input_dir,
        resolutions=resolutions or (),
        seed=seed,
        samples=samples,
        db_path=Path(db) if db else None,
        log_level=log_level,
    )
