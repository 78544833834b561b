from enum import Enum
from pathlib import Path

import pandas as pd


class OutputFormatType(Enum):
    JSON = "json"
    CSV = "csv"

    def write_table(self, table: pd.DataFrame, out: Path, stem: str) -> Path:
        """Writes `<stem>.csv` or `<stem>.json` (one record per row) under `out`."""
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{stem}.{self.value}"
        if self is OutputFormatType.CSV:
            table.to_csv(path, index=False, encoding="utf-8")
        else:
            table.to_json(path, orient="records", indent=2)
        return path
