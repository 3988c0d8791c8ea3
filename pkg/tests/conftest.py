"""Session hooks: collect acceptance verdicts, merge them into the results CSV.

The CSV accumulates across partial runs (a session that exercises one
criterion must not clobber rows for the others) and is flushed as soon as
a verdict lands, so downstream consumers can read it mid-session.
"""

import csv
from pathlib import Path

RESULTS_PATH = Path(__file__).resolve().parent.parent / "acceptance_out" / "acceptance_results.csv"


def _load_existing() -> dict:
    if not RESULTS_PATH.exists():
        return {}
    with open(RESULTS_PATH, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        return {int(row[0]): (row[1], row[2]) for row in reader if row}


def _flush(config) -> None:
    merged = _load_existing()
    for criterion, status, detail in config._acceptance_rows:
        merged[criterion] = (status, detail)
    RESULTS_PATH.parent.mkdir(exist_ok=True)
    with open(RESULTS_PATH, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("criterion", "status", "detail"))
        for criterion in sorted(merged):
            writer.writerow((criterion, *merged[criterion]))


def record_verdict(config, criterion: int, status: str, detail: str) -> None:
    rows = config._acceptance_rows
    rows[:] = [r for r in rows if r[0] != criterion]
    rows.append((criterion, status, detail))
    _flush(config)


def pytest_configure(config):
    # unconditional: hook call order across conftests is not guaranteed, so
    # whenever this suite is in the session its flushing recorder wins
    config._acceptance_rows = []
    config._acceptance_record = record_verdict


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if getattr(config, "_acceptance_record", None) is not record_verdict:
        return
    rows = sorted(config._acceptance_rows)
    if not rows:
        return
    terminalreporter.write_line("")
    for criterion, status, _detail in rows:
        terminalreporter.write_line(f"ACCEPTANCE {criterion}: {status}")
