"""Scenario files, the evaluation context and the report builder."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .checks import REGISTRY
from .courant import TwistClass
from .dirac import constant_frame, graph_of_bivector, graph_of_two_form
from .fields import KIND_DEGREE, SmoothField
from .geometry import exterior_derivative

SCHEMA_VERSION = 1
ROUNDOFF_FLOOR = 1e-12
ORDER_SLACK = 0.5
CSV_HEADER = ["check", "N", "residual", "fitted_order", "status"]

TOP_KEYS = {"name", "description", "dimension", "seed", "ladder", "checks", "exploratory",
            "twist", "tolerances", "fields", "frame", "options"}
FIELD_KEYS = {"kind", "terms"}
TERM_KEYS = {"coeff", "powers", "slots"}
FRAME_KEYS = {"kind", "two_form", "bivector", "q", "p", "maximal", "base_point"}
FRAME_KINDS = {"tangent", "bgraph", "pigraph", "constant"}
OPTION_KEYS = {"twist_sign", "lagrangian_expect", "coisotropy_tol", "control_defect_min",
               "path_origin", "path_direction"}


class ScenarioError(ValueError):
    """The scenario file is malformed or names something unknown."""


def _version():
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0+unknown"


def _unknown(table, allowed, where):
    extra = sorted(set(table) - allowed)
    if extra:
        raise ScenarioError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _field_from_spec(name, spec, dim):
    if not isinstance(spec, dict):
        raise ScenarioError(f"fields.{name} must be a table")
    _unknown(spec, FIELD_KEYS, f"fields.{name}")
    kind = spec.get("kind")
    if kind not in KIND_DEGREE:
        raise ScenarioError(f"fields.{name}: unknown kind {kind!r}")
    terms = []
    for k, term in enumerate(spec.get("terms", [])):
        if not isinstance(term, dict):
            raise ScenarioError(f"fields.{name}.terms[{k}] must be an inline table")
        _unknown(term, TERM_KEYS, f"fields.{name}.terms[{k}]")
        powers = list(term.get("powers", [0] * dim))
        slots = list(term.get("slots", []))
        if len(powers) != dim or any(p < 0 for p in powers):
            raise ScenarioError(f"fields.{name}.terms[{k}]: powers must be {dim} non-negative integers")
        if sum(powers) > 3:
            raise ScenarioError(f"fields.{name}.terms[{k}]: polynomial degree above 3")
        if any(not 1 <= s <= dim for s in slots):
            raise ScenarioError(f"fields.{name}.terms[{k}]: slot indices run from 1 to {dim}")
        terms.append((float(term.get("coeff", 1.0)), tuple(powers), tuple(s - 1 for s in slots)))
    try:
        if not terms:
            return SmoothField.zero(kind, dim)
        return SmoothField.polynomial(kind, dim, terms)
    except ValueError as exc:
        raise ScenarioError(f"fields.{name}: {exc}") from exc


@dataclass
class Scenario:
    name: str
    dimension: int
    seed: int
    ladder: list
    checks: list
    description: str = ""
    exploratory: list = field(default_factory=list)
    twist: str | None = None
    tolerances: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    frame: dict | None = None
    options: dict = field(default_factory=dict)
    source: str = ""

    @classmethod
    def from_text(cls, text, source=""):
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ScenarioError(f"{source or 'scenario'}: {exc}") from exc
        return cls.from_dict(raw, source)

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read {path}: {exc}") from exc
        return cls.from_text(text, path.name)

    @classmethod
    def from_dict(cls, raw, source=""):
        _unknown(raw, TOP_KEYS, "scenario")
        for key in ("name", "dimension", "checks"):
            if key not in raw:
                raise ScenarioError(f"missing required key {key!r}")
        dim = raw["dimension"]
        if not isinstance(dim, int) or not 2 <= dim <= 6:
            raise ScenarioError("dimension must be an integer between 2 and 6")
        ladder = list(raw.get("ladder", [8, 16, 32]))
        if not ladder or any(not isinstance(N, int) or N < 2 for N in ladder):
            raise ScenarioError("ladder must be a list of integers >= 2")
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ScenarioError("ladder must be strictly increasing")
        checks = list(raw["checks"])
        exploratory = list(raw.get("exploratory", []))
        for cid in checks + exploratory:
            if cid not in REGISTRY:
                raise ScenarioError(f"unknown check id {cid!r}")
        if len(set(checks + exploratory)) != len(checks) + len(exploratory):
            raise ScenarioError("a check id is listed twice")
        if len(ladder) < 3 and any(REGISTRY[c].expected_order is not None for c in checks + exploratory):
            raise ScenarioError("order-fitted checks need a ladder of length >= 3")
        tolerances = dict(raw.get("tolerances", {}))
        for cid, tol in tolerances.items():
            if cid not in REGISTRY:
                raise ScenarioError(f"tolerance for unknown check id {cid!r}")
            if not isinstance(tol, (int, float)) or tol < 0:
                raise ScenarioError(f"tolerance for {cid} must be a non-negative number")
        fields = {name: _field_from_spec(name, spec, dim) for name, spec in raw.get("fields", {}).items()}
        frame = raw.get("frame")
        if frame is not None:
            _unknown(frame, FRAME_KEYS, "frame")
            if frame.get("kind") not in FRAME_KINDS:
                raise ScenarioError(f"frame.kind must be one of {sorted(FRAME_KINDS)}")
            for key in ("two_form", "bivector"):
                if key in frame and frame[key] not in fields:
                    raise ScenarioError(f"frame.{key} names an undefined field {frame[key]!r}")
        twist = raw.get("twist")
        if twist is not None and twist != "exact" and twist not in fields:
            raise ScenarioError(f"twist names an undefined field {twist!r}")
        options = dict(raw.get("options", {}))
        _unknown(options, OPTION_KEYS, "options")
        if options.get("lagrangian_expect", "lagrangian") not in ("lagrangian", "not-coisotropic"):
            raise ScenarioError("options.lagrangian_expect must be 'lagrangian' or 'not-coisotropic'")
        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ScenarioError("seed must be a non-negative integer")
        return cls(raw["name"], dim, seed, ladder, checks, raw.get("description", ""), exploratory,
                   twist, tolerances, fields, frame, options, source)


class Context:
    """Everything a check needs: fields, twist, frame and options."""

    def __init__(self, scenario: Scenario, seed=None):
        self.scenario = scenario
        self.dim = scenario.dimension
        self.seed = scenario.seed if seed is None else int(seed)
        self.fields = scenario.fields
        self.options = scenario.options
        fr = scenario.frame or {}
        self.base_point = np.asarray(fr.get("base_point", np.zeros(self.dim)), dtype=float)
        self.path_origin = np.asarray(self.options.get("path_origin", np.zeros(self.dim)), dtype=float)
        self.path_direction = np.asarray(self.options.get("path_direction", np.eye(self.dim)[0]), dtype=float)
        for name, arr in (("frame.base_point", self.base_point), ("options.path_origin", self.path_origin),
                          ("options.path_direction", self.path_direction)):
            if arr.shape != (self.dim,):
                raise ScenarioError(f"{name} needs one entry per dimension")
        self.twist = self._twist()
        sign = float(self.options.get("twist_sign", 1.0))
        if self.twist is None or sign == 1.0:
            self.transgression_twist = self.twist
        else:
            self.transgression_twist = self.twist.scaled(sign)
        self.frame = self._frame() if scenario.frame is not None else None
        if self.frame is not None:
            # fill the bracket cache up front so concurrent checks only read it
            for a in range(self.frame.rank):
                for b in range(self.frame.rank):
                    self.frame.bracket(a, b)

    def _twist(self):
        name = self.scenario.twist
        if name is None:
            return None
        if name == "exact":
            fr = self.scenario.frame or {}
            if "two_form" not in fr:
                raise ScenarioError("twist = 'exact' needs frame.two_form")
            return TwistClass(exterior_derivative(self.fields[fr["two_form"]]))
        H = self.fields[name]
        if H.kind != "three-form":
            raise ScenarioError(f"twist field {name!r} is a {H.kind}")
        return TwistClass(H)

    def _frame(self):
        fr = self.scenario.frame
        kind = fr["kind"]
        n = self.dim
        try:
            if kind == "tangent":
                return graph_of_two_form(SmoothField.zero("two-form", n), self.twist_or_zero())
            if kind == "bgraph":
                return graph_of_two_form(self.fields[fr["two_form"]], self.twist_or_zero())
            if kind == "pigraph":
                return graph_of_bivector(self.fields[fr["bivector"]])
            q = np.asarray(fr["q"], dtype=float)
            p = np.asarray(fr["p"], dtype=float)
            return constant_frame(q, p, self.twist, maximal=fr.get("maximal", True))
        except KeyError as exc:
            raise ScenarioError(f"frame of kind {kind} needs key {exc}") from exc
        except ValueError as exc:
            raise ScenarioError(f"frame rejected: {exc}") from exc

    def twist_or_zero(self):
        return self.twist if self.twist is not None else TwistClass.zero(self.dim)

    def require_twist(self):
        if self.twist is None:
            raise ScenarioError("this check needs a twist field")
        return self.twist

    def tolerance(self, cid):
        return float(self.scenario.tolerances.get(cid, REGISTRY[cid].tolerance))


# ---------------------------------------------------------------------------
# evaluation


def fitted_orders(ladder, residuals):
    """log2-ratio orders between successive ladder entries (None below the roundoff floor)."""
    out = [None]
    for (N0, r0), (N1, r1) in zip(zip(ladder, residuals), zip(ladder[1:], residuals[1:])):
        if r0 is None or r1 is None or r0 <= ROUNDOFF_FLOOR or r1 <= ROUNDOFF_FLOOR:
            out.append(None)
        else:
            out.append(math.log2(r0 / r1) / math.log2(N1 / N0))
    return out


def _verdict(check, tol, ladder, residuals, details):
    if any(d.get("error") for d in details):
        return "fail"
    if check.mode == "monotone":
        ok = all(r > tol for r in residuals)
        ok = ok and all(b >= a * (1.0 - 1e-9) for a, b in zip(residuals, residuals[1:]))
        return "pass" if ok else "fail"
    last = details[-1]
    if "pass" in last:
        if any(d.get("inconclusive") for d in details):
            return "inconclusive"
        return "pass" if all(d["pass"] for d in details) else "fail"
    final = residuals[-1]
    if not (final < tol or final <= tol == 0.0):
        return "fail"
    if check.expected_order is None or final <= ROUNDOFF_FLOOR:
        return "pass"
    order = fitted_orders(ladder, residuals)[-1]
    if order is None or order < check.expected_order - ORDER_SLACK:
        return "fail"
    return "pass"


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _evaluate(ctx, cid):
    check = REGISTRY[cid]
    ladder = ctx.scenario.ladder if check.ladder else [None]
    residuals, details = [], []
    for N in ladder:
        try:
            r, d = check.fn(ctx, N)
            residuals.append(float(r))
            details.append(dict(d))
        except Exception as exc:  # a crashing check is a failing check
            residuals.append(float("nan"))
            details.append({"error": f"{type(exc).__name__}: {exc}"})
    tol = ctx.tolerance(cid)
    status = _verdict(check, tol, ladder, residuals, details)
    orders = fitted_orders(ladder, residuals) if check.expected_order is not None else [None] * len(ladder)
    exploratory = cid in ctx.scenario.exploratory
    return [{
        "check": cid,
        "N": N,
        "residual": r,
        "tolerance": tol,
        "expected_order": check.expected_order,
        "fitted_order": o,
        "status": status,
        "exploratory": exploratory,
        "details": d,
    } for N, r, o, d in zip(ladder, residuals, orders, details)]


def run_scenario(scenario: Scenario, seed=None, jobs=1) -> dict:
    """Evaluate every check of the scenario and assemble the report."""
    ctx = Context(scenario, seed)
    ids = sorted(scenario.checks + scenario.exploratory)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            blocks = list(pool.map(lambda c: _evaluate(ctx, c), ids))
    else:
        blocks = [_evaluate(ctx, c) for c in ids]
    results = [rec for block in blocks for rec in block]
    results.sort(key=lambda rec: (rec["check"], -1 if rec["N"] is None else rec["N"]))
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": {
            "name": scenario.name,
            "description": scenario.description,
            "source": scenario.source,
            "dimension": scenario.dimension,
            "ladder": scenario.ladder,
            "checks": sorted(scenario.checks),
            "exploratory": sorted(scenario.exploratory),
            "twist": scenario.twist,
            "options": scenario.options,
        },
        "environment": {
            "package": "artifact",
            "version": _version(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "seed": ctx.seed,
            "tolerances": {cid: ctx.tolerance(cid) for cid in ids},
            "roundoff_floor": ROUNDOFF_FLOOR,
            "order_slack": ORDER_SLACK,
        },
        "results": results,
    }
    return _clean(report)


def report_json(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in report["results"]:
        order = rec["fitted_order"]
        w.writerow([rec["check"], "" if rec["N"] is None else rec["N"], repr(rec["residual"]),
                    "" if order is None else f"{order:.4f}", rec["status"]])
    return buf.getvalue()


def gating(report):
    """Statuses of the non-exploratory checks, one per check id."""
    out = {}
    for rec in report["results"]:
        if not rec["exploratory"]:
            out[rec["check"]] = rec["status"]
    return out


def exit_code(report) -> int:
    statuses = set(gating(report).values())
    if "fail" in statuses:
        return 1
    if "inconclusive" in statuses:
        return 3
    return 0
