"""Fixtures: small experiment directories generated through the real CLI.

The simulator is driven as a subprocess (the file schemas are the interface
under test, so the fixtures must come through them), once per session. The
acceptance hook mirrors the simulator suite's verdict plumbing: when both
suites run in one pytest session the criterion-12 row joins the shared
results CSV, standalone runs just print the verdict line.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

pytest.importorskip("dynperc_reports")

REPO_ROOT = Path(__file__).resolve().parents[2]
EXPORT_DIR = REPO_ROOT / "acceptance_out" / "export"
RESULTS_CSV = REPO_ROOT / "acceptance_out" / "acceptance_results.csv"


def _standalone_record(config, criterion, status, detail):
    rows = config._acceptance_rows
    rows[:] = [r for r in rows if r[0] != criterion]
    rows.append((criterion, status, detail))


def pytest_configure(config):
    # the simulator suite's conftest installs a flushing recorder
    # unconditionally; only claim the slot when running standalone
    if not hasattr(config, "_acceptance_rows"):
        config._acceptance_rows = []
        config._acceptance_record = _standalone_record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if getattr(config, "_acceptance_record", None) is not _standalone_record:
        return
    for criterion, status, _detail in sorted(config._acceptance_rows):
        terminalreporter.write_line(f"ACCEPTANCE {criterion}: {status}")


@pytest.fixture
def record(request):
    def _record(criterion: int, ok: bool, detail: str = ""):
        request.config._acceptance_record(
            request.config, criterion, "PASS" if ok else "FAIL", detail
        )

    return _record


def _run_cli(args, cwd=None):
    exe = shutil.which("dynperc")
    if exe is None:
        pytest.skip("dynperc CLI not on PATH")
    proc = subprocess.run([exe, *args], capture_output=True, text=True, cwd=cwd)
    assert proc.returncode == 0, f"dynperc {' '.join(args)} failed:\n{proc.stderr}"


def _write_config(path: Path, config: dict) -> Path:
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def cli_runs(tmp_path_factory):
    """One directory tree of real CLI outputs shared by the whole session."""
    root = tmp_path_factory.mktemp("cli_runs")

    theta_dirs = []
    for lam in (0.7, 1.1, 1.5):
        for box in (5.0, 8.0):
            out = root / f"theta_l{lam:g}_M{box:g}"
            cfg = _write_config(
                root / f"theta_l{lam:g}_M{box:g}.json",
                {
                    "geometry": {"dimension": 2, "intensity": lam, "radius": 1.0, "box_side": box},
                    "mc": {"replications": 600},
                    "seeds": {"master": 90},
                },
            )
            _run_cli(["estimate-theta", "--config", str(cfg), "--out", str(out)])
            theta_dirs.append(out)

    mu_out = root / "mu"
    cfg = _write_config(
        root / "mu.json",
        {
            "geometry": {
                "dimension": 2, "intensity": 2.0, "radius": 1.0,
                "window_side": 150.0, "distance_bands": [[20.0, 28.0], [28.0, 36.0]],
            },
            "mc": {"n_pairs": 30},
            "seeds": {"master": 91},
        },
    )
    _run_cli(["estimate-mu", "--config", str(cfg), "--out", str(mu_out)])

    finite_out = root / "two_scale"
    cfg = _write_config(
        root / "two_scale.json",
        {
            "model": {"name": "two-scale", "horizon": 6.0},
            "geometry": {"dimension": 2, "intensity": 2.0, "radius": 1.0, "box_side": 5.0},
            "grid": {"n_t": 25},
            "mc": {"replications": 40},
            "seeds": {"master": 92},
        },
    )
    _run_cli(["simulate-two-scale", "--config", str(cfg), "--out", str(finite_out)])

    limit_out = root / "limit"
    cfg = _write_config(
        root / "limit.json",
        {
            "geometry": {"dimension": 2, "intensity": 2.0, "radius": 1.0, "box_side": 5.0},
            "grid": {"n_t": 25},
            "mc": {"replications": 40, "n_inner": 40, "profile_samples": 2000},
            "seeds": {"master": 93},
        },
    )
    _run_cli(["sample-limit", "theorem2", "--config", str(cfg), "--out", str(limit_out)])

    cmp_out = root / "cmp"
    _run_cli(["compare", str(finite_out / "pairings.csv"), str(limit_out / "pairings.csv"),
              "--out", str(cmp_out)])
    self_cmp_out = root / "self_cmp"
    _run_cli(["compare", str(finite_out / "pairings.csv"), str(finite_out / "pairings.csv"),
              "--out", str(self_cmp_out)])

    return {
        "root": root,
        "theta": theta_dirs,
        "mu": mu_out,
        "finite": finite_out,
        "limit": limit_out,
        "cmp": cmp_out,
        "self_cmp": self_cmp_out,
    }


@pytest.fixture(scope="session")
def cov_run(tmp_path_factory):
    """Covariance-decay estimates written by the simulator's own API.

    No subcommand emits these, so a helper process calls the estimator and
    the standard writers; the files land in the same schema as everything
    else.
    """
    out = tmp_path_factory.mktemp("cov_run") / "cov"
    out.mkdir()
    script = f"""
import numpy as np
from dynperc import DisplacementDistribution, RngStream, TimeGrid, TwoScaleConfig
from dynperc import __version__
from dynperc.dynamics import estimate_covariance_decay
from dynperc.outputs import write_estimates, write_manifest

rows = []
for horizon in (8.0, 16.0, 32.0):
    cfg = TwoScaleConfig(2.0, 1.0, 5.0, horizon, 2, DisplacementDistribution(), TimeGrid(20))
    est = estimate_covariance_decay(
        "two-scale", 0.2, 0.7, cfg, 48, RngStream(94).substream("cov", int(horizon))
    )
    rows.append((f"cov[T={{horizon:g}}]", est.value, est.std_error, est.n_samples))
config = {{
    "model": {{"name": "two-scale"}},
    "geometry": {{"dimension": 2, "intensity": 2.0, "radius": 1.0, "box_side": 5.0}},
    "grid": {{"n_t": 20}},
    "mc": {{"replications": 48}},
    "seeds": {{"master": 94}},
}}
write_estimates(r"{out}/estimates.csv", rows)
write_manifest(r"{out}/manifest.json", "estimate-covariance", config, 94,
               [r"{out}/estimates.csv"], 0.0, __version__, threads=1)
"""
    probe = subprocess.run([sys.executable, "-c", "import dynperc"], capture_output=True)
    if probe.returncode != 0:
        pytest.skip("covariance fixture needs the simulator installed")
    proc = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out
