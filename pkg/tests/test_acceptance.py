"""Acceptance criteria 1-7, one pass/fail line each.

Run directly (``python tests/test_acceptance.py``) or through pytest, where
the lines are also repeated in the terminal summary.
"""
import sys
import time

import pytest

from pointer_ideality import checks, cli

ACCEPTANCE_LINES: list[str] = []

DETERMINISM_CONFIG = """
family = squeezed
seed = 123
mc_samples = 20000
params.sigma0 = 0.8, 1.0
params.g = 0.5:1.5:3
params.t = 1.0
params.C = -1.0, 0.0
"""


def _record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.mark.acceptance
@pytest.mark.parametrize("check", checks.CHECKS, ids=lambda c: c.__name__)
def test_criterion(check):
    result = check()
    _record(result.line())
    for detail in result.details:
        print(f"    {detail}")
    assert result.passed, "\n".join(result.details)


def check_determinism(tmp_dir) -> checks.CheckResult:
    start = time.perf_counter()
    status = cli.main(["paper-check"])
    cfg = tmp_dir / "sweep.ini"
    cfg.write_text(DETERMINISM_CONFIG)
    outputs = []
    for k, workers in enumerate(("1", "4", "1")):
        out = tmp_dir / f"run{k}.csv"
        code = cli.main(["sweep", "--config", str(cfg), "--workers", workers, "--out", str(out)])
        outputs.append((code, out.read_bytes()))
    identical = all(code == 0 for code, _ in outputs) and len({data for _, data in outputs}) == 1
    header_ok = outputs[0][1].decode().splitlines()[0].count(",") == 16
    elapsed = time.perf_counter() - start
    return checks.CheckResult(7, "paper-check exit code and byte-identical CSV", status == 0 and identical and header_ok,
                              elapsed, 60.0, [
        f"paper-check exit status {status}",
        f"three sweeps (workers 1, 4, 1) byte-identical: {identical}; 17-column header: {header_ok}",
    ])


@pytest.mark.acceptance
def test_criterion_7(tmp_path):
    result = check_determinism(tmp_path)
    _record(result.line())
    assert result.passed, "\n".join(result.details)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    results = checks.run_all()
    with tempfile.TemporaryDirectory() as tmp:
        results.append(check_determinism(Path(tmp)))
    print()
    for res in results:
        print(res.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
