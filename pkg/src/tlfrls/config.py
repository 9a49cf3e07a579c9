"""INI-style experiment configuration.

Grammar (``#`` and ``;`` start comments; keys before the first section
belong to ``[experiment]``)::

    case = case2            ; case1 | case2 | custom
    steps = 2400
    lambda = 0.01           ; optional, applied to every method that has one
    [input]        amplitude, frequency, offset
    [tolerances]   eps_rank, eps_div, eps_psd
    [schedule]     <start step> = <plant label a|b|c>
    [plant]        theta_a = 1.6, -0.8, 0.46, 0.43
    [method NAME]  kind, lambda, mu, inner, gain, capacity

Listing any ``[method ...]`` section replaces the case's default method set.
Overrides use dotted keys, for example ``steps=500``, ``input.frequency=0.2``,
``schedule.600=c`` or ``method.tlf_rls_df_mu_0.99_lambda_0.01.mu=0.5``.
"""

import configparser
import math
import re
from dataclasses import replace

from .errors import ParseError, ValidationError
from .experiments import CASES, MethodSpec, default_config
from .linalg import Tolerances
from .plant import InputSignal

__all__ = ["parse_config", "dump_config", "parse_override"]

_TOP = "__top__"
_EXPERIMENT_KEYS = {
    "case": str,
    "steps": int,
    "seed": int,
    "gamma": float,
    "excitation_window": int,
    "p_ceiling": float,
    "covariance_form": str,
    "lambda": float,
    "mu": float,
    "gain": float,
}
_INPUT_KEYS = ("amplitude", "frequency", "offset")
_TOL_KEYS = ("eps_rank", "eps_div", "eps_psd")
_METHOD_KEYS = {"kind": str, "lambda": float, "mu": float, "inner": str, "gain": float, "capacity": int}
_PLANT_LABELS = ("a", "b", "c")


def _read_ini(text):
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True, empty_lines_in_values=False
    )
    parser.optionxform = str.lower
    try:
        parser.read_string(f"[{_TOP}]\n" + text)
    except configparser.MissingSectionHeaderError as exc:  # pragma: no cover - header is always present
        raise ParseError("missing section header", exc.lineno - 1, 1) from None
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"duplicate section [{exc.section}]", exc.lineno - 1, 1) from None
    except configparser.DuplicateOptionError as exc:
        line = exc.lineno - 1
        section = "experiment" if exc.section == _TOP else exc.section
        raise ParseError(f"duplicate key {exc.option!r} in [{section}]", line, _column(text, line)) from None
    except configparser.ParsingError as exc:
        lineno, raw = exc.errors[0]
        line = lineno - 1
        raise ParseError(f"cannot parse {raw}; expected 'key = value'", line, _column(text, line)) from None
    sections = {}
    for name in parser.sections():
        key = "experiment" if name == _TOP else name.strip()
        items = dict(parser.items(name))
        if key in sections:
            # Top-level keys plus an explicit [experiment] section.
            clash = set(sections[key]) & set(items)
            if clash:
                raise ValidationError(f"experiment.{sorted(clash)[0]}", "given twice")
            sections[key].update(items)
        else:
            sections[key] = items
    return sections


def _column(text, line):
    lines = text.splitlines()
    if 1 <= line <= len(lines):
        body = lines[line - 1]
        return len(body) - len(body.lstrip()) + 1
    return 1


def _convert(field, raw, kind):
    raw = raw.strip()
    if kind is str:
        if not raw:
            raise ValidationError(field, "empty value")
        return raw
    try:
        value = kind(raw)
    except ValueError:
        expected = "an integer" if kind is int else "a number"
        raise ValidationError(field, f"expected {expected}, got {raw!r}") from None
    if kind is float and not math.isfinite(value):
        raise ValidationError(field, f"must be finite, got {raw!r}")
    return value


def _floats(field, raw):
    parts = [p for p in re.split(r"[,\s]+", raw.strip()) if p]
    return tuple(_convert(field, p, float) for p in parts)


def parse_override(item):
    """Split ``"a.b=c"`` into ``(["a", "b"], "c")``."""
    if "=" not in item:
        raise ValidationError(item, "override must look like key=value")
    key, value = item.split("=", 1)
    key = key.strip()
    if not key:
        raise ValidationError(item, "override has an empty key")
    if key.lower().startswith("method."):
        name, _, leaf = key[len("method."):].rpartition(".")
        if not name or not leaf:
            raise ValidationError(key, "method overrides look like method.NAME.key=value")
        return ["method " + name, leaf.lower()], value.strip()
    if "." in key:
        section, leaf = key.lower().split(".", 1)
        return [section, leaf], value.strip()
    return ["experiment", key.lower()], value.strip()


def _method_sections(sections):
    return {k[len("method "):].strip(): v for k, v in sections.items() if k.startswith("method ")}


def _spec_to_items(spec):
    items = {"kind": spec.kind}
    for key, attr in (("lambda", "lam"), ("mu", "mu"), ("inner", "inner"), ("gain", "gain"), ("capacity", "capacity")):
        value = getattr(spec, attr)
        if value is not None:
            items[key] = repr(value) if isinstance(value, float) else str(value)
    return items


def parse_config(text, case=None, overrides=()):
    """Parse config ``text`` into an :class:`ExperimentConfig`.

    ``case`` is the subcommand's case and wins over an absent ``case`` key; a
    conflicting ``case`` key is a validation error. ``overrides`` are
    ``key=value`` strings applied after the file.
    Raises ParseError on malformed syntax and ValidationError on bad values.
    """
    sections = _read_ini(text)
    for path, value in map(parse_override, overrides):
        section, leaf = path
        if section.startswith("method ") and section not in sections:
            # Overriding a default method: materialize the defaults first.
            _materialize_methods(sections, case)
            if section not in sections:
                raise ValidationError(f"method.{section[7:]}", "no such method")
        elif section == "schedule" and section not in sections:
            base = default_config(_resolve_case(sections.get("experiment", {}), case))
            sections["schedule"] = {str(start): label for start, label in base.schedule}
        sections.setdefault(section, {})[leaf] = value
    return _build(sections, case)


def _resolve_case(exp, case):
    given = exp.get("case")
    if given is not None:
        given = given.strip().lower()
        if given not in CASES:
            raise ValidationError("case", f"must be one of {', '.join(CASES)}, got {given!r}")
        if case is not None and given != case:
            raise ValidationError("case", f"file says {given!r} but {case!r} was requested")
        return given
    return case or "case1"


def _materialize_methods(sections, case):
    if _method_sections(sections):
        return
    base = default_config(_resolve_case(sections.get("experiment", {}), case))
    for spec in base.methods:
        sections["method " + spec.name] = _spec_to_items(spec)


def _build(sections, case):
    known = {"experiment", "input", "tolerances", "schedule", "plant"}
    for name in sections:
        if name not in known and not name.startswith("method "):
            raise ValidationError(name, "unknown section")
    exp = sections.get("experiment", {})
    for key in exp:
        if key not in _EXPERIMENT_KEYS:
            raise ValidationError(key, "unknown key")
    case_id = _resolve_case(exp, case)
    cfg = default_config(case_id)
    changes = {}
    values = {k: _convert(k, v, _EXPERIMENT_KEYS[k]) for k, v in exp.items() if k != "case"}
    for key in ("steps", "seed", "gamma", "excitation_window", "p_ceiling", "covariance_form"):
        if key in values:
            changes[key] = values[key]

    if "input" in sections:
        raw = sections["input"]
        for key in raw:
            if key not in _INPUT_KEYS:
                raise ValidationError(f"input.{key}", "unknown key")
        changes["input"] = InputSignal(**{k: _convert(f"input.{k}", v, float) for k, v in raw.items()})

    if "tolerances" in sections:
        raw = sections["tolerances"]
        for key in raw:
            if key not in _TOL_KEYS:
                raise ValidationError(f"tolerances.{key}", "unknown key")
        vals = {k: _convert(f"tolerances.{k}", v, float) for k, v in raw.items()}
        try:
            changes["tolerances"] = Tolerances(**vals)
        except ValueError as exc:
            field = str(exc).split(" ", 1)[0]
            raise ValidationError(f"tolerances.{field}", str(exc)) from None

    if "schedule" in sections:
        entries = []
        for start, label in sections["schedule"].items():
            step = _convert(f"schedule.{start}", start, int)
            label = label.strip().lower()
            if label not in _PLANT_LABELS:
                raise ValidationError(f"schedule.{start}", f"unknown plant label {label!r}")
            entries.append((step, label))
        changes["schedule"] = tuple(sorted(entries))

    if "plant" in sections:
        thetas = []
        for key, raw in sections["plant"].items():
            label = key[len("theta_"):] if key.startswith("theta_") else None
            if label not in _PLANT_LABELS:
                raise ValidationError(f"plant.{key}", "unknown key; expected theta_a, theta_b or theta_c")
            theta = _floats(f"plant.{key}", raw)
            if len(theta) != 4:
                raise ValidationError(f"plant.{key}", f"needs 4 values, got {len(theta)}")
            thetas.append((label, theta))
        changes["thetas"] = tuple(sorted(thetas))

    methods = _method_sections(sections)
    if methods:
        specs = []
        for name, raw in methods.items():
            specs.append(_build_method(name, raw))
        changes["methods"] = tuple(specs)
    specs = changes.get("methods", cfg.methods)
    specs = _apply_globals(specs, values)
    changes["methods"] = specs
    if not specs:
        raise ValidationError("methods", "at least one [method NAME] section is required")
    return replace(cfg, **changes)


def _build_method(name, raw):
    for key in raw:
        if key not in _METHOD_KEYS:
            raise ValidationError(f"{name}.{key}", "unknown key")
    if "kind" not in raw:
        raise ValidationError(f"{name}.kind", "missing")
    vals = {k: _convert(f"{name}.{k}", v, _METHOD_KEYS[k]) for k, v in raw.items()}
    inner = vals.get("inner")
    if inner is not None and inner not in ("df", "ef", "none"):
        raise ValidationError(f"{name}.inner", f"must be df, ef or none, got {inner!r}")
    try:
        return MethodSpec(
            kind=vals["kind"],
            lam=vals.get("lambda"),
            mu=vals.get("mu"),
            inner=inner,
            gain=vals.get("gain"),
            capacity=vals.get("capacity"),
            name=name,
        )
    except ValidationError as exc:
        if exc.field == "kind":
            raise ValidationError(f"{name}.kind", str(exc).split(": ", 1)[-1]) from None
        raise


def _apply_globals(specs, values):
    lam, mu, gain = values.get("lambda"), values.get("mu"), values.get("gain")
    if lam is not None and not 0.0 < lam < 1.0:
        raise ValidationError("lambda", f"must lie in (0, 1), got {lam!r}")
    if mu is not None and not 0.0 <= mu < 1.0:
        raise ValidationError("mu", f"must lie in [0, 1), got {mu!r}")
    if gain is not None and not 0.0 < gain < 2.0:
        raise ValidationError("gain", f"must lie in (0, 2), got {gain!r}")
    out = []
    for spec in specs:
        changes = {}
        if lam is not None and spec.lam is not None:
            changes["lam"] = lam
        if mu is not None and spec.mu is not None:
            changes["mu"] = mu
        if gain is not None and spec.gain is not None:
            changes["gain"] = gain
        out.append(replace(spec, **changes) if changes else spec)
    return tuple(out)


def _fmt(value):
    return repr(float(value)) if isinstance(value, float) else str(value)


def dump_config(cfg):
    """Serialize ``cfg`` so that ``parse_config(dump_config(cfg)) == cfg``."""
    lines = [
        "[experiment]",
        f"case = {cfg.case_id}",
        f"steps = {cfg.steps}",
        f"seed = {cfg.seed}",
        f"gamma = {_fmt(cfg.gamma)}",
        f"excitation_window = {cfg.excitation_window}",
        f"p_ceiling = {_fmt(cfg.p_ceiling)}",
        f"covariance_form = {cfg.covariance_form}",
        "",
        "[input]",
        *(f"{k} = {_fmt(getattr(cfg.input, k))}" for k in _INPUT_KEYS),
        "",
        "[tolerances]",
        *(f"{k} = {_fmt(getattr(cfg.tolerances, k))}" for k in _TOL_KEYS),
        "",
        "[schedule]",
        *(f"{start} = {label}" for start, label in cfg.schedule),
    ]
    if cfg.thetas:
        lines += ["", "[plant]"]
        lines += [f"theta_{label} = {', '.join(_fmt(v) for v in theta)}" for label, theta in cfg.thetas]
    for spec in cfg.methods:
        lines += ["", f"[method {spec.name}]"]
        lines += [f"{k} = {v}" for k, v in _spec_to_items(spec).items()]
    return "\n".join(lines) + "\n"
