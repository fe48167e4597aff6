import csv
import io
import subprocess
import sys
from contextlib import contextmanager
from pathlib import Path

import pytest

from geoch import violation as vio

DATA = Path(__file__).parent / "data"
TABLE_STARTS = 16

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


def run_cli(*args, check=True):
    proc = subprocess.run([sys.executable, "-m", "geoch.cli", *args], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"geoch {' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def fast_cfg():
    return vio.OptimizerConfig(starts=TABLE_STARTS)


@pytest.fixture(scope="session")
def table_files(tmp_path_factory):
    """Tables I and II produced once through the CLI; shared by several tests."""
    out = tmp_path_factory.mktemp("tables")
    files = {}
    for which in ("I", "II"):
        path = out / f"table{which}.csv"
        run_cli("tables", which, "--starts", str(TABLE_STARTS), "--out", str(path))
        files[which] = path
    return files


@pytest.fixture(scope="session")
def tables(table_files):
    """``{which: {(type, state): row}}`` with floats parsed."""
    out = {}
    for which, path in table_files.items():
        rows = csv.DictReader(io.StringIO(path.read_text()))
        out[which] = {
            (r["type"], r["state"]): {k: (float(r[k]) if r[k] else None) for k in ("n", "v_crit", "eta_crit")}
            for r in rows
        }
    return out


@pytest.fixture
def criterion(request):
    """Record pass/fail for an acceptance criterion; printed in the terminal summary."""
    results = request.config.stash[_RESULTS]

    @contextmanager
    def record(number, title):
        notes = []
        try:
            yield notes
        except BaseException as exc:
            msg = str(exc).strip().splitlines()
            results.setdefault(number, []).append((False, title, msg[0] if msg else type(exc).__name__))
            raise
        results.setdefault(number, []).append((True, title, "; ".join(notes)))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        parts = results[number]
        ok = all(p[0] for p in parts)
        detail = " | ".join(f"{t} ({note or 'ok'})" if good else f"{t} FAILED: {note}" for good, t, note in parts)
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
