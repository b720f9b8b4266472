"""Config-driven parameter sweeps over pointer families.

Configuration is flat ``key = value`` text.  Keys may be written with dots
(``grid.n = 4801``) or grouped under INI sections (``[grid]`` then
``n = 4801``); both spellings flatten to the same dotted key.  A parameter
value is a number, a comma list (``0, 0.5, 1``) or ``start:stop:count``.
"""
from __future__ import annotations

import configparser
import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import WINDOW_GUARD, Grid, GridError, auto_grid, translate
from .measurement import (
    QubitState,
    channel_probabilities,
    make_composite,
    povm_elements,
    povm_probabilities,
    sample_outcomes,
)
from .measures import IdealityReport, gaussian_closed_forms, ideality_report, squeezed_closed_forms
from .pointers import (
    FaithfulParams,
    GaussianParams,
    SqueezedParams,
    faithful_from_seed,
    faithful_post_states,
    gaussian_envelope,
    gaussian_post,
    linear_phase_pointer,
    squeezed_post,
    triangular_envelope,
)

__all__ = [
    "CSV_COLUMNS",
    "ConfigSyntaxError",
    "ConfigValidationError",
    "GridSettings",
    "RunRecord",
    "SweepSpec",
    "emit",
    "evaluate_point",
    "parse_config",
    "run_sweep",
]

CSV_COLUMNS = (
    "family,sigma0,g,t,C,theta,s,kappa,M_num,absI_num,M_closed,absI_closed,"
    "E_num,gap,phase_dev,truncation,flags"
).split(",")
LITERAL_COLUMNS = ["M_closed_literal", "absI_closed_literal"]
PARAM_COLUMNS = ("sigma0", "g", "t", "C", "theta", "s", "kappa")
SCHEMA_VERSION = 1
CLOSED_FORM_TOL = 1e-6

FAMILY_PARAMS = {
    "gaussian": ("sigma0", "g", "t"),
    "squeezed": ("sigma0", "g", "t", "C"),
    "faithful": ("sigma0", "theta", "s", "tilt", "gamma1_re", "gamma1_im", "m"),
    "linear_phase": ("sigma0", "kappa", "s"),
}
REQUIRED_PARAMS = {
    "gaussian": ("sigma0", "g", "t"),
    "squeezed": ("sigma0", "g", "t", "C"),
    "faithful": ("sigma0", "theta", "s"),
    "linear_phase": ("sigma0", "kappa", "s"),
}
ENVELOPES = {"gaussian": gaussian_envelope, "triangular": triangular_envelope}


class ConfigSyntaxError(ValueError):
    exit_code = 2


class ConfigValidationError(ValueError):
    exit_code = 3

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class GridSettings:
    x_min: float = -12.0
    x_max: float = 12.0
    n: int = 4801
    auto: bool = True

    @property
    def grid(self) -> Grid:
        return Grid(self.x_min, self.x_max, self.n)


@dataclass(frozen=True)
class SweepSpec:
    family: str
    params: dict[str, tuple[float, ...]]
    envelope: str = "gaussian"
    grid: GridSettings = field(default_factory=GridSettings)
    qubit: QubitState = field(
        default_factory=lambda: QubitState(complex(math.sqrt(0.5)), complex(math.sqrt(0.5)))
    )
    output_format: str = "csv"
    seed: int = 0
    workers: int = 1
    cap: int = 1_000_000
    strict_window: bool = False
    paper_literal: bool = False
    mc_samples: int = 0

    def points(self) -> list[dict[str, float]]:
        names = [k for k in FAMILY_PARAMS[self.family] if k in self.params]
        return [
            dict(zip(names, combo))
            for combo in itertools.product(*(self.params[k] for k in names))
        ]


@dataclass
class RunRecord:
    index: int
    family: str
    params: dict[str, float]
    report: IdealityReport | None = None
    M_closed: float | None = None
    absI_closed: float | None = None
    M_closed_literal: float | None = None
    absI_closed_literal: float | None = None
    p_plus: float | None = None
    p_minus: float | None = None
    p_upper_channel: float | None = None
    p_lower_channel: float | None = None
    p_plus_mc: float | None = None
    flags: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def row(self, paper_literal: bool = False) -> dict[str, object]:
        r = self.report
        out: dict[str, object] = {"family": self.family}
        for name in PARAM_COLUMNS:
            out[name] = self.params.get(name)
        out.update(
            M_num=r.M if r else None,
            absI_num=r.absI if r else None,
            M_closed=self.M_closed,
            absI_closed=self.absI_closed,
            E_num=r.E if r else None,
            gap=r.gap if r else None,
            phase_dev=r.phase_dev if r else None,
            truncation=r.truncation if r else None,
            flags=list(self.flags),
        )
        if paper_literal:
            out["M_closed_literal"] = self.M_closed_literal
            out["absI_closed_literal"] = self.absI_closed_literal
        return out


# --------------------------------------------------------------------------
# configuration

_TOP = "__top__"
_SCALAR_KEYS = {
    "family", "format", "seed", "workers", "cap", "strict_window",
    "paper_literal", "mc_samples", "envelope",
}
_GRID_KEYS = {"grid.x_min", "grid.x_max", "grid.n", "grid.auto"}
_QUBIT_KEYS = {"qubit.alpha_re", "qubit.alpha_im", "qubit.beta_re", "qubit.beta_im"}


def _flatten(text: str) -> dict[str, str]:
    parser = configparser.ConfigParser(
        interpolation=None, default_section="__defaults__", inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string(f"[{_TOP}]\n" + text)
    except configparser.Error as exc:
        raise ConfigSyntaxError(str(exc)) from exc
    flat: dict[str, str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            name = key if section == _TOP else f"{section}.{key}"
            if name in flat:
                raise ConfigSyntaxError(f"duplicate key {name!r}")
            flat[name] = value.strip()
    return flat


def _number(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigValidationError(key, f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigValidationError(key, "value must be finite")
    return value


def _integer(key: str, text: str) -> int:
    value = _number(key, text)
    if value != int(value):
        raise ConfigValidationError(key, f"expected an integer, got {text!r}")
    return int(value)


def _boolean(key: str, text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigValidationError(key, f"expected a boolean, got {text!r}")


def _values(key: str, text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigValidationError(key, "range must be start:stop:count")
        start, stop = _number(key, parts[0]), _number(key, parts[1])
        count = _integer(key, parts[2])
        if count < 1:
            raise ConfigValidationError(key, "range count must be >= 1")
        return tuple(float(v) for v in np.linspace(start, stop, count))
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise ConfigValidationError(key, "no values given")
    return tuple(_number(key, item) for item in items)


def _check_params(family: str, params: dict[str, tuple[float, ...]]) -> None:
    for name in REQUIRED_PARAMS[family]:
        if name not in params:
            raise ConfigValidationError(f"params.{name}", f"required for family {family!r}")

    def each(name, ok, message):
        for v in params.get(name, ()):
            if not ok(v):
                raise ConfigValidationError(f"params.{name}", f"{message}, got {v}")

    each("sigma0", lambda v: v > 0, "must be positive")
    each("t", lambda v: v >= 0, "must be >= 0")
    each("s", lambda v: v > 0, "must be positive")
    each("m", lambda v: v == int(v), "must be an integer")
    each("gamma1_re", lambda v: v != 0, "must be nonzero")
    if "tilt" in params and "gamma1_re" in params:
        raise ConfigValidationError("params.tilt", "give either tilt or gamma1_re, not both")
    if "gamma1_im" in params and "gamma1_re" not in params:
        raise ConfigValidationError("params.gamma1_im", "needs params.gamma1_re")


def parse_config(text: str) -> SweepSpec:
    """Parse and validate a sweep configuration.

    Raises :class:`ConfigSyntaxError` for malformed text and
    :class:`ConfigValidationError` (carrying the offending key) otherwise.
    """
    flat = _flatten(text)
    family = flat.get("family")
    if family is None:
        raise ConfigValidationError("family", "missing")
    if family not in FAMILY_PARAMS:
        raise ConfigValidationError("family", f"unknown family {family!r}")

    params: dict[str, tuple[float, ...]] = {}
    grid_fields: dict[str, object] = {}
    qubit_parts = {"alpha_re": 0.0, "alpha_im": 0.0, "beta_re": 0.0, "beta_im": 0.0}
    qubit_given = False
    options: dict[str, object] = {}

    for key, value in flat.items():
        if key.startswith("params."):
            name = key.removeprefix("params.")
            if name == "envelope":
                options["envelope"] = value
                continue
            if name not in FAMILY_PARAMS[family]:
                raise ConfigValidationError(key, f"unknown parameter for family {family!r}")
            params[name] = _values(key, value)
        elif key in _GRID_KEYS:
            name = key.removeprefix("grid.")
            if name == "auto":
                grid_fields[name] = _boolean(key, value)
            elif name == "n":
                grid_fields[name] = _integer(key, value)
            else:
                grid_fields[name] = _number(key, value)
        elif key in _QUBIT_KEYS:
            qubit_parts[key.removeprefix("qubit.")] = _number(key, value)
            qubit_given = True
        elif key in _SCALAR_KEYS:
            options[key] = value
        else:
            raise ConfigValidationError(key, "unknown key")

    _check_params(family, params)

    spec_kwargs: dict[str, object] = {"family": family, "params": params}
    if "envelope" in options:
        if options["envelope"] not in ENVELOPES:
            raise ConfigValidationError("envelope", f"expected one of {sorted(ENVELOPES)}")
        spec_kwargs["envelope"] = options["envelope"]
    if "format" in options:
        if options["format"] not in ("csv", "json"):
            raise ConfigValidationError("format", "expected csv or json")
        spec_kwargs["output_format"] = options["format"]
    for key in ("seed", "workers", "cap", "mc_samples"):
        if key in options:
            spec_kwargs[key] = _integer(key, str(options[key]))
    for key in ("strict_window", "paper_literal"):
        if key in options:
            spec_kwargs[key] = _boolean(key, str(options[key]))
    if spec_kwargs.get("seed", 0) < 0:
        raise ConfigValidationError("seed", "must be >= 0")
    if spec_kwargs.get("workers", 1) < 1:
        raise ConfigValidationError("workers", "must be >= 1")
    if spec_kwargs.get("mc_samples", 0) < 0:
        raise ConfigValidationError("mc_samples", "must be >= 0")

    if grid_fields:
        explicit = {k for k in grid_fields if k != "auto"}
        grid_fields.setdefault("auto", not explicit)
        settings = GridSettings(**grid_fields)
        try:
            settings.grid
        except GridError as exc:
            bad = "grid.n" if "node count" in str(exc) else "grid.x_min"
            raise ConfigValidationError(bad, str(exc)) from None
        spec_kwargs["grid"] = settings

    if qubit_given:
        alpha = complex(qubit_parts["alpha_re"], qubit_parts["alpha_im"])
        beta = complex(qubit_parts["beta_re"], qubit_parts["beta_im"])
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm == 0:
            raise ConfigValidationError("qubit.alpha_re", "qubit amplitudes are all zero")
        spec_kwargs["qubit"] = QubitState(alpha / norm, beta / norm)

    spec = SweepSpec(**spec_kwargs)
    total = math.prod(len(v) for v in params.values())
    if total > spec.cap:
        raise ConfigValidationError("cap", f"{total} sweep points exceed the cap {spec.cap}")
    return spec


# --------------------------------------------------------------------------
# evaluation


def _requirements(spec: SweepSpec, v: dict[str, float]):
    """(center offset, effective width, wavenumber, commensurate shift)."""
    if spec.family == "gaussian":
        p = GaussianParams(v["sigma0"], v["g"], v["t"])
        return p.center, p.sigma_t, p.effective_wavenumber, None
    if spec.family == "squeezed":
        p = SqueezedParams(v["sigma0"], v["g"], v["t"], v["C"])
        return p.center, p.sigma_t, p.effective_wavenumber, None
    if spec.family == "faithful":
        tilt = _faithful_params(v).tilt
        return 2 * abs(tilt) * v["sigma0"] ** 2, v["sigma0"], 0.0, None
    return v["s"], v["sigma0"], 0.0, v["s"]


def _adequate(grid: Grid, center: float, width: float, k: float, shift: float | None) -> bool:
    reach = abs(center) + 8 * width
    h_max = min(width / 8, math.pi / (k + 10 / width))
    if grid.x_min > -reach or grid.x_max < reach or grid.h > h_max:
        return False
    if grid.node_index(0.0) is None:
        return False
    if shift is not None and abs(shift / grid.h - round(shift / grid.h)) > 1e-9:
        return False
    return True


def _choose_grid(spec: SweepSpec, v: dict[str, float]) -> Grid:
    grid = spec.grid.grid
    if not spec.grid.auto:
        return grid
    center, width, k, shift = _requirements(spec, v)
    if _adequate(grid, center, width, k, shift):
        return grid
    return auto_grid(center, width, wavenumber=k, commensurate=shift)


def _faithful_params(v: dict[str, float]) -> FaithfulParams:
    m = int(v.get("m", 0))
    if "gamma1_re" in v:
        gamma1 = complex(v["gamma1_re"], v.get("gamma1_im", 0.0))
        return FaithfulParams(gamma1, v["theta"], v["s"], m)
    return FaithfulParams.from_tilt(v.get("tilt", 0.0), v["theta"], v["s"], m)


def _pair_and_closed_forms(spec: SweepSpec, v: dict[str, float], grid: Grid, record: RunRecord):
    strict = spec.strict_window
    if spec.family == "gaussian":
        p = GaussianParams(v["sigma0"], v["g"], v["t"])
        abs_i, m, m_lit = gaussian_closed_forms(p)
        record.M_closed, record.absI_closed = m, abs_i
        record.M_closed_literal, record.absI_closed_literal = m_lit, abs_i
        return gaussian_post(p, grid, strict=strict)
    if spec.family == "squeezed":
        p = SqueezedParams(v["sigma0"], v["g"], v["t"], v["C"])
        abs_i, m, abs_i_lit = squeezed_closed_forms(p)
        record.M_closed, record.absI_closed = m, abs_i
        record.M_closed_literal, record.absI_closed_literal = m, abs_i_lit
        return squeezed_post(p, grid, strict=strict)
    envelope = ENVELOPES[spec.envelope](grid, v["sigma0"])
    if spec.family == "faithful":
        p = _faithful_params(v)
        # normalized branches have proportional moduli, so M = |I| = 1
        record.M_closed = record.absI_closed = 1.0
        return faithful_post_states(faithful_from_seed(envelope, p), p, strict=strict)
    pointer = linear_phase_pointer(envelope, v["kappa"])
    if spec.envelope == "gaussian":
        record.M_closed = record.absI_closed = math.exp(-v["s"] ** 2 / (2 * v["sigma0"] ** 2))
    return (
        translate(pointer, v["s"], strict=strict),
        translate(pointer, -v["s"], strict=strict),
    )


def _point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def evaluate_point(spec: SweepSpec, index: int, values: dict[str, float]) -> RunRecord:
    """Evaluate one sweep point; failures are recorded in the row, not raised."""
    record = RunRecord(index, spec.family, dict(values))
    try:
        grid = _choose_grid(spec, values)
        psi_plus, psi_minus = _pair_and_closed_forms(spec, values, grid, record)
        report = ideality_report(psi_plus, psi_minus)
    except (GridError, ValueError, ZeroDivisionError, OverflowError) as exc:
        record.error = f"{type(exc).__name__}: {exc}"
        record.flags.append("error")
        return record
    record.report = report
    flags = record.flags
    if record.M_closed is not None and (
        abs(record.M_closed - report.M) > CLOSED_FORM_TOL
        or abs(record.absI_closed - report.absI) > CLOSED_FORM_TOL
    ):
        flags.append("closedform_mismatch")
    if report.truncation >= WINDOW_GUARD:
        flags.append("window_truncation")
    if report.absI < 1e-3 and report.M >= 0.1:
        flags.append("formally_ideal_operationally_nonideal")
    if report.is_faithful:
        flags.append("faithful")
    if math.isfinite(report.E) and abs(report.E - report.E_upper) > 1e-6:
        flags.append("asymmetric_E")

    if math.isfinite(report.E):
        E = min(report.E, 0.5)
        chi = spec.qubit
        record.p_upper_channel, record.p_lower_channel = channel_probabilities(chi, E)
        record.p_plus, record.p_minus = povm_probabilities(chi, povm_elements(E))
        if spec.mc_samples:
            composite = make_composite(chi, psi_plus, psi_minus)
            counts = sample_outcomes(composite, spec.mc_samples, _point_seed(spec.seed, index))
            record.p_plus_mc = counts.upper_fraction
    return record


def run_sweep(spec: SweepSpec) -> list[RunRecord]:
    """One record per Cartesian sweep point, in canonical sweep order."""
    points = spec.points()
    if spec.workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(lambda iv: evaluate_point(spec, *iv), enumerate(points)))
    return [evaluate_point(spec, i, v) for i, v in enumerate(points)]


# --------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return ";".join(value)
    if isinstance(value, str):
        return value
    return f"{float(value):.12g}"


def _json_value(value):
    if value is None or isinstance(value, (str, list)):
        return value
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.12g}")


def emit(records: list[RunRecord], output_format: str = "csv", *, paper_literal: bool = False) -> bytes:
    """Serialize records as CSV (fixed header) or versioned JSON."""
    if not records:
        raise ValueError("nothing to emit")
    if output_format == "csv":
        columns = CSV_COLUMNS + (LITERAL_COLUMNS if paper_literal else [])
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            row = rec.row(paper_literal)
            writer.writerow([_fmt(row[c]) for c in columns])
        return buf.getvalue().encode()
    if output_format == "json":
        rows = []
        for rec in records:
            row = {k: _json_value(v) for k, v in rec.row(paper_literal).items()}
            for extra in ("p_plus", "p_minus", "p_upper_channel", "p_lower_channel", "p_plus_mc"):
                value = getattr(rec, extra)
                if value is not None:
                    row[extra] = _json_value(value)
            if rec.error is not None:
                row["error"] = rec.error
            rows.append(row)
        doc = {"schema_version": SCHEMA_VERSION, "records": rows}
        return (json.dumps(doc, indent=1) + "\n").encode()
    raise ValueError(f"unknown output format {output_format!r}")


def with_overrides(spec: SweepSpec, **changes) -> SweepSpec:
    """Apply CLI overrides, skipping those left as None."""
    return replace(spec, **{k: v for k, v in changes.items() if v is not None})
