from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Any, Dict, Optional, Tuple, Type
import logging
import time
from config.loader import ExperimentConfig, load_config
from experiments.output import OutputDirectory, environment, write_manifest
from experiments.recipes import RECIPES

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

DEFAULT_OUTPUT_DIR = "results"

# Anything raised while reading a config is a configuration error.
CONFIG_ERRORS: Tuple[Type[BaseException], ...] = (
    OSError,
    SyntaxError,
    NameError,
    TypeError,
    ValueError,
    KeyError,
)

# Anything raised while executing a mode is a numerical failure.
RUN_ERRORS: Tuple[Type[BaseException], ...] = (
    ArithmeticError,
    LookupError,
    RuntimeError,
    ValueError,
)


@dataclass(frozen=True)
class RunOutcome:
    """
    How a run ended.

    Attributes:
        status (str): "ok" or "FAILED".
        exit_code (int): Process exit code.
        manifest (str): Path of the manifest file.
        results (Dict[str, Any]): The mode's summary, empty on failure.
        error (Optional[str]): Failure message.
    """

    status: str
    exit_code: int
    manifest: str
    results: Dict[str, Any]
    error: Optional[str] = None


def output_directory(config: ExperimentConfig, override: Optional[str] = None) -> str:
    """--out wins over [output] path, which wins over the default."""
    return override or config.output.path or DEFAULT_OUTPUT_DIR


def with_threads(config: ExperimentConfig, threads: Optional[int]) -> ExperimentConfig:
    if threads is None:
        return config
    if threads < 1:
        raise ValueError(f"threads must be at least 1, got {threads}")
    return replace(config, output=replace(config.output, threads=threads))


def run_experiment(
    config: ExperimentConfig, out_dir: str, config_path: Optional[str] = None
) -> RunOutcome:
    """Executes the config's mode and writes its CSV files and manifest.

    A failing mode keeps the rows written so far; the manifest records
    status FAILED and the error.

    Args:
        config (ExperimentConfig): The validated experiment.
        out_dir (str): Directory receiving the artifacts.
        config_path (Optional[str]): Source file, recorded in the manifest.

    Returns:
        RunOutcome: Status, exit code and summary.
    """
    out = OutputDirectory(out_dir, config.name)
    recipe = RECIPES[config.mode]
    started = datetime.now(timezone.utc)
    clock = time.perf_counter()

    logger.info(
        "Running %s (%s, mode %s) into %s",
        config.name,
        config.scheme.value,
        config.mode,
        out_dir,
    )

    results: Dict[str, Any] = {}
    error: Optional[str] = None
    try:
        results = recipe(config, out)
    except RUN_ERRORS as e:
        error = f"{type(e).__name__}: {e}"
        logger.error("Run %s failed: %s", config.name, error)

    elapsed = time.perf_counter() - clock
    status = "ok" if error is None else "FAILED"
    manifest = {
        "name": config.name,
        "status": status,
        "error": error,
        "config_path": config_path,
        "config": config.describe(),
        "environment": environment(),
        "started_utc": started.isoformat(),
        "elapsed_seconds": elapsed,
        "files": list(out.files),
        "results": results,
    }
    write_manifest(out.manifest_path(), manifest)
    logger.info("Finished %s in %.2f s with status %s", config.name, elapsed, status)

    return RunOutcome(
        status=status,
        exit_code=EXIT_OK if error is None else EXIT_NUMERICAL,
        manifest=out.manifest_path(),
        results=results,
        error=error,
    )


def validate(path: str) -> Tuple[Optional[ExperimentConfig], Optional[str]]:
    """Loads a config, returning it or the diagnostic of the first error."""
    try:
        return load_config(path), None
    except CONFIG_ERRORS as e:
        return None, f"{path}: {type(e).__name__}: {e}"
