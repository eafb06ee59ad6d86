from typing import IO, Any, Dict, List, Mapping, Optional, Sequence
import csv
import json
import logging
import math
import os
import platform
import numpy as np
import scipy
from lib.version import VERSION

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_FILE = "run.log"


def format_cell(value: Any) -> str:
    """Renders a CSV cell; floats use repr so re-runs reproduce the bytes."""
    match value:
        case None:
            return ""
        case bool():
            return "true" if value else "false"
        case float() | np.floating():
            value = float(value)
            return "nan" if math.isnan(value) else repr(value)
        case np.integer():
            return str(int(value))
        case _:
            return str(value)


def plain(value: Any) -> Any:
    """Converts numpy scalars/arrays and tuples into JSON-ready values."""
    match value:
        case dict():
            return {str(k): plain(v) for k, v in value.items()}
        case list() | tuple():
            return [plain(v) for v in value]
        case np.ndarray():
            return [plain(v) for v in value.tolist()]
        case np.floating() | float():
            value = float(value)
            return value if math.isfinite(value) else str(value)
        case np.integer():
            return int(value)
        case np.bool_():
            return bool(value)
        case _:
            return value


class CsvTable:
    """
    A CSV file written row by row with a fixed header. Rows are flushed as
    they arrive so that a failing run keeps what it computed.

    Attributes:
        path (str): Location of the file.
        fieldnames (List[str]): Column headers.
        rows (int): Number of rows written.
    """

    def __init__(self, path: str, fieldnames: Sequence[str]) -> None:
        self.path = path
        self.fieldnames = list(fieldnames)
        self.rows = 0
        self._file: Optional[IO[str]] = None
        self._writer: Optional[Any] = None

    def __enter__(self) -> "CsvTable":
        self._file = open(self.path, "w", encoding="utf-8", newline="")
        self._writer = csv.DictWriter(
            self._file,
            fieldnames=self.fieldnames,
            extrasaction="ignore",
            lineterminator="\n",
        )
        self._writer.writeheader()
        return self

    def __exit__(self, *exc_info: Any) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def write(self, row: Mapping[str, Any]) -> None:
        if self._writer is None or self._file is None:
            raise RuntimeError(f"{self.path} is not open for writing")

        self._writer.writerow({k: format_cell(row.get(k)) for k in self.fieldnames})
        self._file.flush()
        self.rows += 1


class OutputDirectory:
    """
    Names and tracks the artifacts of one run: `<stem>.csv`,
    `<stem>_<suffix>.csv` and `<stem>_manifest.json` inside `root`.
    """

    def __init__(self, root: str, stem: str) -> None:
        self.root = root
        self.stem = stem
        self.files: List[str] = []
        os.makedirs(root, exist_ok=True)

    def path(self, suffix: str = "", extension: str = "csv") -> str:
        name = f"{self.stem}_{suffix}" if suffix else self.stem
        return os.path.join(self.root, f"{name}.{extension}")

    def table(self, fieldnames: Sequence[str], suffix: str = "") -> CsvTable:
        path = self.path(suffix)
        self.files.append(path)
        logger.debug("Writing %s", path)
        return CsvTable(path, fieldnames)

    def manifest_path(self) -> str:
        return self.path("manifest", "json")


def environment() -> Dict[str, str]:
    """Versions of everything that affects the numbers."""
    return {
        "coolopt": VERSION,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def write_manifest(path: str, manifest: Mapping[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as file:
        json.dump(plain(dict(manifest)), file, ensure_ascii=False, indent=2)
        file.write("\n")


def configure_logging(level: str = "INFO", log_dir: Optional[str] = None) -> None:
    """Logs to stderr and, when a directory is given, to `run.log` inside it."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_dir is not None:
        os.makedirs(log_dir, exist_ok=True)
        path = os.path.join(log_dir, LOG_FILE)
        handlers.append(logging.FileHandler(path, encoding="utf-8"))

    logging.basicConfig(
        level=level.upper(), format=LOG_FORMAT, handlers=handlers, force=True
    )
