"""Output helpers: atomic JSON artifacts, CSV tables and number formatting"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class Util:
    DEFAULT_OUTPUT_DIR = Path(os.environ.get("DIVAUDIT_OUTPUT_DIR", "divaudit-out"))

    @staticmethod
    def output_dir(path: Optional[Union[str, Path]] = None) -> Path:
        """Resolve and create the output directory; ``DIVAUDIT_OUTPUT_DIR`` is read at call time."""
        if path is None:
            path = os.environ.get("DIVAUDIT_OUTPUT_DIR", Util.DEFAULT_OUTPUT_DIR)
        out = Path(path)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OSError(f"cannot create output directory {str(out)!r}: {e}") from e
        return out

    @staticmethod
    def fmt17(x: Any) -> str:
        """17 significant digits, enough to round-trip a double"""
        if isinstance(x, bool) or x is None:
            return "" if x is None else str(x)
        if isinstance(x, (int, float)):
            if math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return format(float(x), ".17g")
        return str(x)

    @staticmethod
    def payload(kind: str, body: dict[str, Any]) -> dict[str, Any]:
        """Wrap a result with the schema version and a timestamp"""
        return {
            "schema": SCHEMA_VERSION,
            "kind": kind,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            **body,
        }

    @staticmethod
    def write_json(path: Union[str, Path], data: dict[str, Any]) -> Path:
        """Write ``data`` atomically (temporary file in the target directory, then rename).

        Raises:
            OSError: With the target path in the message.
        """
        path = Path(path)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w") as f:
                json.dump(data, f, indent=2, sort_keys=True)
                f.write("\n")
            os.replace(tmp, path)
        except OSError as e:
            Path(tmp).unlink(missing_ok=True)
            raise OSError(f"cannot write {str(path)!r}: {e}") from e
        logger.info("wrote %s", path)
        return path

    @staticmethod
    def read_json(path: Union[str, Path]) -> dict[str, Any]:
        try:
            with open(path) as f:
                return json.load(f)
        except OSError as e:
            raise OSError(f"cannot read {str(path)!r}: {e}") from e

    @staticmethod
    def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Write a CSV table with every number at 17 significant digits, atomically"""
        path = Path(path)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(header)
                for row in rows:
                    writer.writerow([Util.fmt17(x) for x in row])
            os.replace(tmp, path)
        except OSError as e:
            Path(tmp).unlink(missing_ok=True)
            raise OSError(f"cannot write {str(path)!r}: {e}") from e
        logger.info("wrote %s", path)
        return path
