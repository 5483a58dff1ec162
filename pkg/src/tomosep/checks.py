"""Worked examples with known closed-form answers, runnable from the CLI."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import io
from .channels import depolarizing
from .errors import NotPositiveError
from .linmap import DensityMatrix, Superoperator
from .separability import (
    WERNER_G0,
    MapProbe,
    SubsystemMapEnsemble,
    depolarizing_probes,
    generalized_werner,
    ghz_state,
    peres_test,
    qutrit_pair,
    werner_state,
    witness_F,
    witness_scan,
    x_state_margins,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: str
    detail: dict = field(default_factory=dict)


def werner_closed_form(p: float, eps: float) -> float:
    return 3 * abs((1 + eps * p) / 4) + abs((1 - 3 * p * eps) / 4)


def qutrit_three_closed_form(eps: float) -> float:
    return 8 * abs((1 + eps) / 9) + abs((1 - 8 * eps) / 9)


def qutrit_two_closed_form(eps: float) -> float:
    return 5 * abs(1 + eps) / 6 + abs(1 - 5 * eps) / 6


def second_subsystem_depolarizing(dims, eps: float) -> SubsystemMapEnsemble:
    maps = [Superoperator.identity(d) for d in dims]
    maps[-1] = depolarizing(dims[-1], eps)
    return SubsystemMapEnsemble.single(maps)


def check_werner_boundary() -> CheckResult:
    rows = {}
    ok = True
    for p in (0.0, 0.1, 0.2, 1 / 3, 0.4, 0.7, 1.0):
        f = witness_scan(werner_state(p), (2, 2)).f_max
        good = abs(f - 1) <= 1e-9 if p <= 1 / 3 else f > 1.01
        ok &= good
        rows[f"{p:.6g}"] = f
    return CheckResult("werner-boundary", ok,
                       "F_max = 1 for p <= 1/3 and > 1.01 above", {"f_max": rows})


def check_werner_formula() -> CheckResult:
    worst = 0.0
    for p, eps in itertools.product(np.linspace(-1 / 3, 1, 21), np.linspace(-1, 1, 21)):
        f = witness_F(werner_state(p), (2, 2), second_subsystem_depolarizing((2, 2), eps), WERNER_G0)
        worst = max(worst, abs(f - werner_closed_form(p, eps)))
    peak = witness_F(werner_state(1.0), (2, 2), second_subsystem_depolarizing((2, 2), 1.0), WERNER_G0)
    ok = worst <= 1e-12 and abs(peak - 2) <= 1e-12
    return CheckResult("werner-formula", ok,
                       f"closed form on 21x21 grid, max error {worst:.2e}; F(p=1, eps=1) = {peak:.15g}",
                       {"max_error": worst, "peak": peak})


def _qutrit(kind: str, formula: Callable[[float], float], expected_max: float) -> CheckResult:
    rho = qutrit_pair(kind)
    grid = np.linspace(-1, 0.5, 41)
    curve = []
    worst = 0.0
    for eps in grid:
        probe = MapProbe({"eps": [-1.0, float(eps)]},
                         second_subsystem_depolarizing((3, 3), float(eps)))
        f = witness_scan(rho, (3, 3), [probe]).f_max
        curve.append((float(eps), f))
        worst = max(worst, abs(f - formula(eps)))
    scan = witness_scan(rho, (3, 3), depolarizing_probes((3, 3), 41, "last"))
    arg = scan.argmax_params["eps"][-1]
    ok = worst <= 1e-12 and abs(scan.f_max - expected_max) <= 1e-12 and abs(arg - 0.5) <= 1e-12
    name = "qutrit3" if kind == "three-term" else "qutrit2"
    return CheckResult(name, ok,
                       f"max F = {scan.f_max:.15g} at eps = {arg:g} (expected {expected_max:.15g})",
                       {"curve": curve, "max_error": worst, "f_max": scan.f_max, "argmax_eps": arg})


def check_qutrit3() -> CheckResult:
    return _qutrit("three-term", qutrit_three_closed_form, 5 / 3)


def check_qutrit2() -> CheckResult:
    return _qutrit("two-term", qutrit_two_closed_form, 3 / 2)


def check_peres() -> CheckResult:
    mismatches = []
    for p in np.arange(-0.32, 1.0 + 1e-9, 0.02):
        p = float(round(p, 10))
        ppt, _ = peres_test(werner_state(p), (2, 2))
        if ppt == (p > 1 / 3):
            mismatches.append(p)
    margin = x_state_margins(werner_state(1 / 3))[1]
    ok = not mismatches and abs(margin) <= 1e-12
    return CheckResult("peres", ok,
                       f"{len(mismatches)} Werner PPT mismatches; X-state margin at p=1/3 = {margin:.2e}",
                       {"mismatches": mismatches, "boundary_margin": margin})


def check_octahedron() -> CheckResult:
    grid = np.linspace(-1, 1, 9)
    checked, bad = 0, []
    for mu in itertools.product(grid, repeat=3):
        try:
            rho = generalized_werner(mu)
        except NotPositiveError:
            continue
        checked += 1
        ppt, _ = peres_test(rho, (2, 2))
        inside = sum(abs(m) for m in mu) <= 1 + 1e-12
        if ppt != inside:
            bad.append([float(m) for m in mu])
    return CheckResult("octahedron", not bad,
                       f"PPT <=> |mu1|+|mu2|+|mu3| <= 1 on {checked} valid grid points, {len(bad)} mismatches",
                       {"checked": checked, "mismatches": bad})


def check_ghz() -> CheckResult:
    rho = ghz_state(3)
    scan = witness_scan(rho, (2, 2, 2), depolarizing_probes((2, 2, 2), 5, "product"))
    return CheckResult("ghz", scan.f_max > 1 + 1e-9,
                       f"3-qubit GHZ: max F = {scan.f_max:.6g} at eps = {scan.argmax_params['eps']}",
                       {"f_max": scan.f_max})


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "werner-boundary": check_werner_boundary,
    "werner-formula": check_werner_formula,
    "qutrit3": check_qutrit3,
    "qutrit2": check_qutrit2,
    "peres": check_peres,
    "octahedron": check_octahedron,
    "ghz": check_ghz,
}


def run_checks(names=None) -> list[CheckResult]:
    names = list(CHECKS) if not names else names
    return [CHECKS[n]() for n in names]


BUNDLED_STATES = {
    "werner_p0.2": lambda: werner_state(0.2),
    "werner_p0.5": lambda: werner_state(0.5),
    "werner_p1": lambda: werner_state(1.0),
    "qutrit_three_term": lambda: qutrit_pair("three-term"),
    "qutrit_two_term": lambda: qutrit_pair("two-term"),
    "ghz3": lambda: ghz_state(3),
    "spin_up": lambda: DensityMatrix(np.diag([1.0, 0.0])),
}


def export_states(directory) -> list[Path]:
    """Write the bundled example states as state files into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, make in BUNDLED_STATES.items():
        rho = make()
        path = directory / f"{name}.json"
        io.write_state_file(path, rho.mat, rho.dims)
        paths.append(path)
    return paths
