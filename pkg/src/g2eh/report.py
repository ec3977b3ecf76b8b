"""Check records and deterministic JSON/CSV report assembly."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class Check:
    """One verification check: a named assertion with measured vs expected."""

    id: str
    description: str
    status: str  # "pass" | "fail" | "error"
    measured: object = None
    expected: object = None
    tol: object = None

    def as_dict(self) -> dict:
        out = asdict(self)
        for key in ("measured", "expected", "tol"):
            val = out[key]
            if val is not None and not isinstance(val, (int, float, str, bool, list)):
                out[key] = str(val)
        return out


def check_bool(cid: str, description: str, ok: bool, measured=None, expected=None) -> Check:
    return Check(cid, description, "pass" if ok else "fail", measured=measured, expected=expected)


def check_close(cid: str, description: str, measured: float, expected: float, tol: float, relative: bool = False) -> Check:
    err = abs(measured - expected)
    if relative:
        err /= max(abs(expected), 1e-300)
    ok = err <= tol
    return Check(cid, description, "pass" if ok else "fail", measured=measured, expected=expected, tol=tol)


def check_below(cid: str, description: str, measured: float, bound: float) -> Check:
    return Check(cid, description, "pass" if measured <= bound else "fail", measured=measured, expected=f"<= {bound}", tol=bound)


def guarded(suite_fn, *args, **kwargs) -> list:
    """Run a suite, converting any exception into a single failed check."""
    try:
        return suite_fn(*args, **kwargs)
    except Exception as exc:  # noqa: BLE001 - diagnostics belong in the report
        name = getattr(suite_fn, "__name__", "suite")
        return [Check(f"{name}.error", f"suite raised {type(exc).__name__}", "error", measured=str(exc))]


@dataclass
class Report:
    seed: int
    config: dict
    checks: list = field(default_factory=list)

    def summary(self) -> dict:
        passed = sum(1 for c in self.checks if c.status == "pass")
        return {"pass": passed, "fail": len(self.checks) - passed, "total": len(self.checks)}

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def as_json(self, timestamp: bool = True) -> str:
        payload = {
            "schema": "g2eh-report/1",
            "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()) if timestamp else None,
            "seed": self.seed,
            "config": self.config,
            "checks": [c.as_dict() for c in sorted(self.checks, key=lambda c: c.id)],
            "summary": self.summary(),
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def write(self, out_dir: str | Path, name: str = "report.json") -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        path.write_text(self.as_json() + "\n", encoding="utf-8")
        return path


def run_suites(suite_fns: dict, seed: int, config: dict, parallel: bool = True) -> Report:
    """Run named suites (optionally in parallel) into one order-stable report."""
    report = Report(seed=seed, config=config)
    if parallel and len(suite_fns) > 1:
        with ThreadPoolExecutor(max_workers=min(4, len(suite_fns))) as pool:
            futures = {name: pool.submit(guarded, fn) for name, fn in suite_fns.items()}
            for name in suite_fns:
                report.checks.extend(futures[name].result())
    else:
        for fn in suite_fns.values():
            report.checks.extend(guarded(fn))
    report.checks.sort(key=lambda c: c.id)
    return report


def write_csv(out_dir: str | Path, name: str, header: list, rows: list) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
