"""Scenario runners behind the command-line subcommands.

Each runner returns ``(exit_status, document)``; exit status 0 means the
verdict is a pass and 1 that at least one condition failed.
"""
from __future__ import annotations

import math

import numpy as np

from . import __version__, kernels
from .asymptotics import (
    Condition,
    ConditionReport,
    RayLadder,
    extract_B,
    extract_psi,
    verify_em,
    verify_scalar,
)
from .minkowski import Event, NullDirection
from .scenario import ConfigError, Scenario, _get, _vector3
from .solver import scalar_potentials, scalar_samples, vector_potentials
from .stress import (
    ASYMPTOTIC,
    EXACT,
    em_flux,
    em_stress,
    gauss_charge,
    scalar_flux,
    scalar_stress,
    time_averaged_flux,
)

PASS, FAIL, CONFIG_ERROR, NUMERICAL_ERROR = 0, 1, 2, 3
REPORT_SCHEMA = "fieldcheck-report/1"
FLUX_SIGN_FLOOR = 1e-10
CHARGE_RADIUS_TOLERANCE = 5e-3
CHARGE_FLOOR = 1e-10
CONVERGENCE_FLOOR = 1e-12


def _header(sc: Scenario, command: str) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "command": command,
        "scenario": sc.name,
        "theory": sc.theory,
        "orientation": sc.orientation.value,
        "flags": sc.flags,
    }


def metadata() -> dict:
    return {"version": __version__, "backend": kernels.backend_name()}


def _finish(doc: dict, conditions: list) -> tuple[int, dict]:
    verdict = all(c.passed for c in conditions)
    doc["verdict"] = "pass" if verdict else "fail"
    doc["failed"] = [c.name for c in conditions if not c.passed]
    doc["metadata"] = metadata()
    return (PASS if verdict else FAIL), doc


def _flux_fn(sc: Scenario, radius: float, method: str):
    if sc.theory == "scalar":
        return lambda u0: scalar_flux(sc.source, radius, u0, sc.sphere, sc.orientation, sc.rule, method)
    return lambda u0: em_flux(sc.source, radius, u0, sc.sphere, sc.orientation, sc.rule, method, sc.gauge)


def _flux_methods(spec) -> list[str]:
    method = _get(spec, "method", "flux", "both")
    if method == "both":
        return [EXACT, ASYMPTOTIC]
    if method not in (EXACT, ASYMPTOTIC):
        raise ConfigError(f"method must be '{EXACT}', '{ASYMPTOTIC}' or 'both'", "flux.method")
    return [method]


def flux_section(sc: Scenario) -> tuple[list, list]:
    """Flux values for every radius, phase and method, plus the W_0 >= 0 condition."""
    spec = sc.flux or {}
    radii = [float(r) for r in _get(spec, "radii", "flux", [100.0], kind=list)]
    phases = [float(u) for u in _get(spec, "phases", "flux", [sc.ladder.u0], kind=list)]
    average = bool(_get(spec, "period_average", "flux", False))
    n_avg = _get(spec, "average_samples", "flux", 8, kind=int)
    if any(r <= 2 * sc.source.radius for r in radii):
        raise ConfigError("flux radii must exceed twice the source radius", "flux.radii")
    rows, asym_energy = [], []
    for radius in radii:
        for method in _flux_methods(spec):
            fn = _flux_fn(sc, radius, method)
            for u0 in phases:
                f = fn(u0)
                rows.append({**f.to_dict(), "u0": u0})
                if method == ASYMPTOTIC:
                    asym_energy.append(f.energy)
            if average:
                omega = sc.source.max_omega
                if omega <= 0:
                    raise ConfigError("period average needs an oscillating source", "flux.period_average")
                f = time_averaged_flux(fn, omega, n_avg)
                rows.append({**f.to_dict(), "u0": None})
    conditions = []
    if asym_energy:
        scale = max(abs(w) for w in asym_energy)
        worst = min(asym_energy)
        limit = -FLUX_SIGN_FLOOR * max(scale, 1.0)
        conditions.append(Condition("flux_nonnegative", "sign", worst >= limit, limit, worst,
                                    note="min asymptotic-amplitude W_0 over radii and phases"))
    return rows, conditions


def charge_section(sc: Scenario) -> tuple[list, list]:
    spec = sc.charge or {}
    radii = [float(r) for r in _get(spec, "radii", "charge", [5.0, 10.0], kind=list)]
    t = _get(spec, "time", "charge", 0.0, kind=float)
    if any(r <= 2 * sc.source.radius for r in radii):
        raise ConfigError("charge radii must exceed twice the source radius", "charge.radii")
    values = [gauss_charge(sc.source, r, t, sc.sphere, sc.rule, sc.orientation, sc.gauge) for r in radii]
    rows = [{"radius": r, "time": t, "charge": e} for r, e in zip(radii, values)]
    spread = max(values) - min(values)
    size = max(abs(e) for e in values)
    limit = max(CHARGE_RADIUS_TOLERANCE * size, CHARGE_FLOOR)
    cond = Condition("charge_radius_independent", "spread", spread <= limit, limit, spread,
                     note="max - min of Gauss charge over radii")
    return rows, [cond]


def verification_reports(sc: Scenario) -> list[ConditionReport]:
    reports = []
    for ladder in sc.ladder.ladders(sc.source):
        if sc.theory == "scalar":
            reports.append(verify_scalar(sc.source, ladder, sc.rule, sc.orientation, sc.thresholds))
        else:
            reports.append(verify_em(sc.source, ladder, sc.rule, sc.orientation, sc.thresholds, sc.gauge))
    return reports


def run_verify(sc: Scenario) -> tuple[int, dict]:
    doc = _header(sc, "verify")
    reports = verification_reports(sc)
    conditions = [c for r in reports for c in r.conditions]
    doc["reports"] = [r.to_dict() for r in reports]
    if sc.flux is not None:
        doc["flux"], extra = flux_section(sc)
        doc["flux_conditions"] = [c.to_dict() for c in extra]
        conditions += extra
    if sc.theory == "maxwell" and sc.charge is not None:
        doc["charge"], extra = charge_section(sc)
        doc["charge_conditions"] = [c.to_dict() for c in extra]
        conditions += extra
    return _finish(doc, conditions)


def run_flux(sc: Scenario) -> tuple[int, dict]:
    doc = _header(sc, "flux")
    doc["flux"], conditions = flux_section(sc)
    doc["flux_conditions"] = [c.to_dict() for c in conditions]
    return _finish(doc, conditions)


def run_charge(sc: Scenario) -> tuple[int, dict]:
    if sc.theory != "maxwell":
        raise ConfigError("Gauss charge needs the maxwell theory", "theory")
    doc = _header(sc, "charge")
    doc["charge"], conditions = charge_section(sc)
    doc["charge_conditions"] = [c.to_dict() for c in conditions]
    return _finish(doc, conditions)


# --- sampling -------------------------------------------------------------

_WHATS = ("potential", "gradient", "field", "stress", "psi")


def _grid_events(sc: Scenario, grid: dict) -> tuple[list, list]:
    kind = _get(grid, "kind", "sample.grid", "ladder")
    if kind == "ladder":
        ladder = sc.ladder.ladders(sc.source)[0]
        rungs = _get(grid, "rungs", "sample.grid", None)
        if rungs is not None:
            rungs = _get(grid, "rungs", "sample.grid", kind=int)
            if rungs < 1:
                raise ConfigError("must be positive", "sample.grid.rungs")
            growth = ladder.radii[1] / ladder.radii[0]
            ladder = RayLadder.geometric(ladder.direction, ladder.radii[0], growth, rungs, ladder.u0)
        return ladder.events(sc.source.center), [ladder.direction] * len(ladder.radii)
    if kind == "ray":
        n = np.asarray(_vector3(_get(grid, "direction", "sample.grid", [0.0, 0.0, 1.0]), "sample.grid.direction"))
        n = n / np.linalg.norm(n)
        radii = _get(grid, "radii", "sample.grid", kind=list)
        t = _get(grid, "time", "sample.grid", 0.0, kind=float)
        c = sc.source.center
        events = [Event.at(t, c + float(r) * n) for r in radii]
        return events, [NullDirection(tuple(n), sc.orientation)] * len(events)
    raise ConfigError("grid kind must be 'ladder' or 'ray'", "sample.grid.kind")


def _upper(prefix, mat):
    names, vals = [], []
    for i in range(4):
        for j in range(i, 4):
            names.append(f"{prefix}{i}{j}")
            vals.append(mat[i, j])
    return names, vals


def run_sample(sc: Scenario, what: str | None = None) -> tuple[list[str], list[list[float]]]:
    """Tabulate a field quantity; returns ``(header, rows)``."""
    spec = sc.sample or {}
    what = what or _get(spec, "what", "sample", "potential")
    if what not in _WHATS:
        raise ConfigError(f"unknown sample quantity; choose from {list(_WHATS)}", "sample.what")
    events, dirs = _grid_events(sc, _get(spec, "grid", "sample", {"kind": "ladder"}))
    base = ["t", "x", "y", "z", "r"]
    rows = []
    src, orient = sc.source, sc.orientation
    if sc.theory == "scalar":
        if what == "potential":
            header = base + ["phi"]
            vals = scalar_potentials(src, events, orient, sc.rule)
            rows = [[*e.coords, e.r, v] for e, v in zip(events, vals)]
            return header, rows
        samples = scalar_samples(src, events, orient, sc.rule)
        if what in ("gradient", "field"):
            header = base + [f"phi_{mu}" for mu in range(4)]
            rows = [[*s.event.coords, s.event.r, *s.gradient.components] for s in samples]
        elif what == "stress":
            header = None
            for s in samples:
                st = scalar_stress(s.gradient)
                names, vals = _upper("T", st.array)
                header = base + names + ["L"]
                rows.append([*s.event.coords, s.event.r, *vals, st.lagrangian])
        else:
            header = ["r", "psi"]
            rows = [[s.event.r, extract_psi(s.gradient, d)[0]] for s, d in zip(samples, dirs)]
        return header, rows

    samples = vector_potentials(src, events, orient, sc.rule, sc.gauge)
    if what == "potential":
        header = base + [f"A{mu}" for mu in range(4)]
        rows = [[*s.event.coords, s.event.r, *s.potential.components] for s in samples]
    elif what == "gradient":
        header = base + [f"dA_{r}_{c}" for r in range(4) for c in range(4)]
        rows = [[*s.event.coords, s.event.r, *s.jacobian.components.reshape(-1)] for s in samples]
    elif what == "field":
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        header = base + [f"f_{i}{j}" for i, j in pairs]
        rows = [[*s.event.coords, s.event.r, *(s.field.components[i, j] for i, j in pairs)] for s in samples]
    elif what == "stress":
        header = None
        for s in samples:
            names, vals = _upper("T", em_stress(s.field).array)
            header = base + names
            rows.append([*s.event.coords, s.event.r, *vals])
    else:
        header = ["r", "B0", "B1", "B2", "B3"]
        rows = [[s.event.r, *extract_B(s.jacobian).components] for s in samples]
    return header, rows


# --- convergence ----------------------------------------------------------

def _envelope(src, r: float) -> float:
    """Rough bound on ``|phi|`` or ``|A|`` at distance ``r``: total term amplitude over ``r``."""
    return sum(abs(t.scale) * (abs(t.time.amplitude) + abs(t.time.offset)) for t in src.terms) / r


def _convergence_quantity(sc: Scenario, target: str):
    """Returns ``(quantity, reference)``; ``reference`` sets the rounding floor (None: use the values)."""
    if target == "flux":
        spec = sc.flux or {}
        radius = float(_get(spec, "radii", "flux", [100.0], kind=list)[0])
        u0 = float(_get(spec, "phases", "flux", [sc.ladder.u0], kind=list)[0])
        return (lambda s: _flux_fn(s, radius, EXACT)(u0).energy), None
    if target == "potential":
        ladder: RayLadder = sc.ladder.ladders(sc.source)[0]
        ev = ladder.events(sc.source.center)[0]
        reference = _envelope(sc.source, ev.r)
        if sc.theory == "scalar":
            return (lambda s: float(scalar_potentials(s.source, [ev], s.orientation, s.rule)[0])), reference
        return (lambda s: float(np.linalg.norm(vector_potentials(s.source, [ev], s.orientation, s.rule)[0].potential.components))), reference
    raise ConfigError("convergence target must be 'flux' or 'potential'", "convergence.target")


def assess_convergence(values, rel_floor: float = CONVERGENCE_FLOOR, reference: float | None = None) -> dict:
    """Successive changes must strictly decrease unless they are already at the rounding floor.

    The floor is ``rel_floor`` times the larger of ``reference`` and the biggest value, so a
    quantity that happens to vanish is not judged on its rounding noise.
    """
    deltas = [abs(b - a) for a, b in zip(values, values[1:])]
    floor = rel_floor * max(max(abs(v) for v in values), reference or 0.0, 1e-300)
    at_floor = [d <= floor for d in deltas]
    shrinking = all(b < a or fb for a, b, fb in zip(deltas, deltas[1:], at_floor[1:]))
    converged = shrinking or all(at_floor)
    ratios = [a / b if b > 0 else math.inf for a, b in zip(deltas, deltas[1:])]
    return {
        "deltas": deltas,
        "shrink_ratios": ratios,
        "floor": floor,
        "at_floor": at_floor,
        "converged": converged,
        "non_convergence": not converged,
    }


def run_convergence(sc: Scenario) -> tuple[int, dict]:
    """Repeat a quantity at quadrature orders x1, x1.5, x2 and check that the changes shrink."""
    spec = sc.convergence or {}
    target = _get(spec, "target", "convergence", "flux" if sc.flux is not None else "potential")
    factors = [float(f) for f in _get(spec, "factors", "convergence", [1.0, 1.5, 2.0], kind=list)]
    if len(factors) < 3 or any(b <= a for a, b in zip(factors, factors[1:])):
        raise ConfigError("need at least three increasing factors", "convergence.factors")
    quantity, reference = _convergence_quantity(sc, target)
    levels = []
    for f in factors:
        rule = sc.rule.scaled(f)
        variant = Scenario(**{**sc.__dict__, "rule": rule})
        levels.append({"factor": f, "orders": [rule.radial, rule.polar, rule.azimuthal], "value": quantity(variant)})
    values = [lv["value"] for lv in levels]
    verdict = assess_convergence(values, reference=reference)
    doc = _header(sc, "convergence")
    doc["convergence"] = {"target": target, "levels": levels, **verdict}
    ratios = verdict["shrink_ratios"]
    cond = Condition("quadrature_convergence", "convergence", verdict["converged"], 1.0, ratios[-1] if ratios else None)
    return _finish(doc, [cond])


def text_summary(doc: dict) -> str:
    lines = [f"{doc['command']} {doc['scenario']} ({doc['theory']}, {doc['orientation']}): {doc['verdict'].upper()}"]
    for rep in doc.get("reports", []):
        lines.append(f"  {rep['label']}: {rep['verdict']}")
        for c in rep["conditions"]:
            measured = "vacuous" if c["vacuous"] else (f"{c['measured']:.4g}" if c["measured"] is not None else "n/a")
            lines.append(f"    {'ok  ' if c['passed'] else 'FAIL'} {c['name']:<20} measured {measured:<12} threshold {c['threshold']:.4g}")
    for row in doc.get("flux", []):
        u0 = "avg" if row["u0"] is None else f"{row['u0']:.4g}"
        lines.append(f"  flux r={row['radius']:g} u0={u0} {row['method']}: W0 = {row['W'][0]:.6g}")
    for row in doc.get("charge", []):
        lines.append(f"  charge r={row['radius']:g} t={row['time']:g}: e = {row['charge']:.8g}")
    conv = doc.get("convergence")
    if conv:
        lines.append(f"  convergence of {conv['target']}: deltas {', '.join(f'{d:.3g}' for d in conv['deltas'])}"
                     f" -> {'converged' if conv['converged'] else 'NOT converging'}")
    for key in ("flux_conditions", "charge_conditions"):
        for c in doc.get(key, []):
            lines.append(f"  {'ok  ' if c['passed'] else 'FAIL'} {c['name']} measured {c['measured']:.4g} limit {c['threshold']:.4g}")
    return "\n".join(lines) + "\n"
