"""Report rows, CSV/JSON emission and plot data files."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

CSV_COLUMNS = ("quantity", "value", "N", "samples", "seed", "status")


@dataclass
class Row:
    quantity: str
    value: float
    N: int | None = None
    samples: int | None = None
    seed: int | None = None
    status: str = "ok"
    generator: str = ""
    message: str = ""

    def csv_fields(self) -> list[str]:
        def fmt(v):
            return "" if v is None else str(v)

        return [self.quantity, repr(float(self.value)), fmt(self.N), fmt(self.samples), fmt(self.seed), self.status]


@dataclass
class LabReport:
    experiment: str
    config: dict
    rows: list[Row] = field(default_factory=list)
    plotdata: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)
    started: float = field(default_factory=time.time)
    finished: float | None = None

    def add(self, quantity: str, value: float, **meta) -> Row:
        value = float(value)
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{quantity}: reported values must be finite and nonnegative, got {value}")
        row = Row(quantity, value, **meta)
        self.rows.append(row)
        return row

    def add_error(self, quantity: str, exc: BaseException, **meta) -> Row:
        row = Row(quantity, math.nan, status="error", message=f"{type(exc).__name__}: {exc}", **meta)
        self.rows.append(row)
        return row

    def compute(self, quantity: str, fn: Callable[[], float], **meta) -> float | None:
        """Run ``fn`` and record its value; an exception marks only this quantity as failed."""
        try:
            value = fn()
            self.add(quantity, value, **meta)
            return float(value)
        except Exception as exc:  # noqa: BLE001 - failure policy: keep the other columns
            self.add_error(quantity, exc, **meta)
            return None

    def extend(self, other: "LabReport", prefix: str = "") -> None:
        for r in other.rows:
            self.rows.append(Row(**{**asdict(r), "quantity": prefix + r.quantity}))
        for name, data in other.plotdata.items():
            self.plotdata[prefix.replace("/", "_").replace(":", "_") + name] = data

    def value(self, quantity: str) -> float | None:
        for r in self.rows:
            if r.quantity == quantity and r.status == "ok":
                return r.value
        return None

    @property
    def partial(self) -> bool:
        return any(r.status != "ok" for r in self.rows)

    def set_plot(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
        self.plotdata[name] = (list(header), [list(r) for r in rows])

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(r.csv_fields() for r in self.rows)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "started": self.started,
            "finished": self.finished,
            "partial": self.partial,
            "rows": [
                {**asdict(r), "value": None if math.isnan(r.value) else r.value} for r in self.rows
            ],
            "plotdata": sorted(self.plotdata),
        }

    def write(self, out: str | Path) -> list[Path]:
        out = Path(out)
        (out / "plotdata").mkdir(parents=True, exist_ok=True)
        self.finished = self.finished or time.time()
        (out / "report.csv").write_text(self.csv_text(), encoding="utf-8")
        (out / "report.json").write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")
        paths = []
        for name, (header, rows) in sorted(self.plotdata.items()):
            p = out / "plotdata" / f"{name}.csv"
            with open(p, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
            paths.append(p)
        return paths

