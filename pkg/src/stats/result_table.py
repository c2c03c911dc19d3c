import csv
import io
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from src.log.system_logger import Logger, get_system_logger
from src.utils.json import dumps_json

COMMENT = "#"


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return value


def _meta_value(value: Any) -> str:
    if isinstance(value, str):
        return value
    return dumps_json(value, indent=0)


def render_csv(columns: Sequence[str], rows: Iterable[Dict[str, Any]],
               meta: Optional[Mapping[str, Any]] = None) -> str:
    """
    Renders rows as CSV text with a header line; missing cells are empty.

    Each `meta` entry becomes a `# key=value` line above the header, keys sorted.
    """
    buffer = io.StringIO()
    for key in sorted(meta or {}):
        buffer.write(f"{COMMENT} {key}={_meta_value(meta[key])}\n")
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buffer.getvalue()


def read_csv_rows(file_path: str) -> List[Dict[str, str]]:
    """Reads a table written by `ResultTable`, skipping its comment lines."""
    with open(file_path, encoding="utf-8") as f:
        return list(csv.DictReader(line for line in f if not line.startswith(COMMENT)))


class ResultTable:
    """
    CSV table of experiment results (bench timings, spectra, sweeps).

    Rows are collected in memory and written in one go so a failed run
    never leaves a half-written table behind.

    Features:
        - Fixed column order given at construction.
        - Floats written with full precision (repr).
        - Settings that produced the table echoed as comment lines.
        - Parent directories created on write.

    Attributes:
        columns (List[str]): Column names in order.
        rows (List[Dict[str, Any]]): Collected rows.
        meta (Dict[str, Any]): Settings written above the header.
    """
    def __init__(self, columns: Sequence[str], meta: Optional[Mapping[str, Any]] = None):
        self.columns: List[str] = list(columns)
        self.rows: List[Dict[str, Any]] = []
        self.meta: Dict[str, Any] = dict(meta or {})
        self.system_logger: Logger = get_system_logger(__name__)

    def add(self, **row: Any) -> None:
        self.rows.append(row)

    def extend(self, rows: Iterable[Dict[str, Any]]) -> None:
        self.rows.extend(rows)

    def render(self) -> str:
        return render_csv(self.columns, self.rows, self.meta)

    def write(self, file_path: Optional[str]) -> str:
        """
        Writes the table to `file_path` (when given) and returns the CSV text.

        Args:
            file_path (Optional[str]): Destination; nothing is written when None.
        """
        text = self.render()
        if file_path:
            path = Path(file_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            self.system_logger.info(f"Wrote {len(self.rows)} rows to '{path}'.")
        return text
