"""Scenario files: the macro-style ``key = value`` text format and JSON.

Text format, one key per line, keys case-insensitive, ``#`` starts a comment::

    dist = binary
    m = 8 8 8 8 8
    designpattern = {
        0 1 1 1 1 1
        0 0 1 1 1 1
    }
    beta_period_effects = -1.266 0.01 0.01 0.01 0.01 0.01

Matrices sit in braces with one row per line; rows may also be separated by
commas, so ``{0 2 1 1, 0 0 2 1}`` works on a single line.  Numbers always use
a dot as the decimal separator.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .exceptions import ConfigError, ParseError
from .model import CorrelationSpec, CorrType, OutcomeModel, TrialSpec

__all__ = ["KEYS", "REQUIRED_KEYS", "parse_text", "load_scenario", "spec_from_mapping", "load_spec"]

KEYS = (
    "designpattern", "cp_size_matrix", "m", "dist", "link", "phi",
    "intervention_effect_type", "period_effect_type", "delta", "beta_period_effects",
    "corr_type", "alpha0", "r0", "alpha1", "alpha2", "alpha3",
    "max_intervention_period", "alpha", "df_choice",
)
REQUIRED_KEYS = (
    "designpattern", "cp_size_matrix", "m", "dist", "phi", "intervention_effect_type",
    "period_effect_type", "delta", "beta_period_effects", "corr_type",
)
MATRIX_KEYS = ("designpattern", "cp_size_matrix")
VECTOR_KEYS = ("m", "beta_period_effects")

_KEY_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


def _number(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"{where}: {token!r} is not a number") from None


def _parse_matrix(key: str, body: str) -> list:
    rows = []
    for chunk in re.split(r"[\n,;]", body):
        tokens = chunk.split()
        if not tokens:
            continue
        idx = len(rows) + 1
        rows.append([_number(tok, f"{key} row {idx}") for tok in tokens])
    if not rows:
        raise ParseError(f"{key}: matrix has no rows")
    width = len(rows[0])
    for idx, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ParseError(f"{key} row {idx}: has {len(row)} entries, expected {width}")
    return rows


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_text(text: str) -> dict:
    """Tokenize the ``key = value`` format into a plain dict."""
    lines = text.splitlines()
    out = {}
    i = 0
    while i < len(lines):
        line = _strip_comment(lines[i]).strip()
        i += 1
        if not line:
            continue
        match = _KEY_RE.match(line)
        if not match:
            raise ParseError(f"line {i}: expected 'key = value', got {line!r}")
        key, value = match.group(1).lower(), match.group(2).strip()
        if value.startswith("{"):
            body = value[1:]
            while "}" not in body:
                if i >= len(lines):
                    raise ParseError(f"{key}: missing closing brace")
                body += "\n" + _strip_comment(lines[i])
                i += 1
            body, rest = body.split("}", 1)
            if rest.strip().strip(",;"):
                raise ParseError(f"{key}: unexpected text after closing brace: {rest.strip()!r}")
            if key in MATRIX_KEYS:
                out[key] = _parse_matrix(key, body)
            else:
                out[key] = [_number(tok, key) for tok in body.replace(",", " ").split()]
        else:
            value = value.rstrip(",;").strip()
            if key in MATRIX_KEYS:
                out[key] = _parse_matrix(key, value)
            elif key in VECTOR_KEYS:
                out[key] = [_number(tok, key) for tok in value.replace(",", " ").split()]
            else:
                out[key] = value
        if key not in KEYS:
            raise ParseError(f"line {i}: unknown key {key!r}")
    return out


def load_scenario(path, as_json: bool = None) -> dict:
    """Read a scenario file; JSON is picked by flag or by a ``.json`` suffix."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if as_json is None:
        as_json = path.suffix.lower() == ".json"
    if as_json:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: top level must be an object")
        return {str(k).lower(): v for k, v in raw.items()}
    return parse_text(text)


def _scalar(raw: dict, key: str, cast, default=None):
    if key not in raw or raw[key] in (None, ""):
        return default
    try:
        return cast(raw[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {raw[key]!r}") from None


def _int(value) -> int:
    f = float(value)
    if f != int(f):
        raise ValueError
    return int(f)


def spec_from_mapping(raw: dict) -> TrialSpec:
    """Build a :class:`TrialSpec` from parsed scenario keys.

    Raises ``ConfigError`` naming the first missing required key.
    """
    raw = {str(k).lower(): v for k, v in raw.items()}
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
    try:
        kind = CorrType.parse(raw["corr_type"])
    except ValueError as exc:
        raise ConfigError(f"corr_type: {exc}") from None
    for key in CorrelationSpec(kind).param_names:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r} for corr_type {kind.value}")
    corr = CorrelationSpec(
        kind,
        **{k: _scalar(raw, k, float) for k in ("alpha0", "r0", "alpha1", "alpha2", "alpha3")},
    )
    try:
        outcome = OutcomeModel(raw["dist"], _scalar(raw, "link", str), _scalar(raw, "phi", float))
        return TrialSpec(
            design_pattern=raw["designpattern"],
            cp_sizes=raw["cp_size_matrix"],
            clusters_per_sequence=raw["m"],
            outcome=outcome,
            intervention_effect_type=raw["intervention_effect_type"],
            period_effect_type=raw["period_effect_type"],
            delta=_scalar(raw, "delta", float),
            beta_period_effects=raw["beta_period_effects"],
            correlation=corr,
            max_intervention_period=_scalar(raw, "max_intervention_period", _int),
            sig_level=_scalar(raw, "alpha", float, 0.05),
            df_choice=_scalar(raw, "df_choice", str, "IMINUSP"),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_spec(path, as_json: bool = None) -> TrialSpec:
    return spec_from_mapping(load_scenario(path, as_json=as_json))
