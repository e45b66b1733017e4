"""JSON interchange and DOT export."""

from __future__ import annotations

import hashlib
import json

from . import __version__
from .groups import (
    F2,
    Ball,
    Box,
    FiniteSubset,
    GroupSpec,
    Lattice,
    Product,
    ProductWindow,
    UnsupportedOperationError,
    Window,
    group_from_json,
)
from .patterns import FullShift, Pattern, Shift
from .shifts import ArrowAssignment, ColorShift, ForcingState, PdoxShift, ProductShift, lift_to_product
from .spaced import ufo_whisker_shape


class ConfigError(ValueError):
    pass


# -- elements, sets, windows ------------------------------------------------------


def parse_group(data) -> GroupSpec:
    if isinstance(data, str):
        shorthand = {"F2": {"kind": "free", "rank": 2}, "Z": {"kind": "lattice", "dim": 1}, "Z2": {"kind": "lattice", "dim": 2}}
        if data not in shorthand:
            raise ConfigError(f"unknown group {data!r}")
        data = shorthand[data]
    try:
        return group_from_json(data)
    except (KeyError, TypeError, UnsupportedOperationError) as exc:
        raise ConfigError(f"bad group description: {exc}") from exc


def format_set(spec: GroupSpec, S) -> list[str]:
    return [spec.format(g) for g in spec.sorted(S)]


def parse_elements(spec: GroupSpec, items) -> list:
    out = []
    for item in items:
        if isinstance(item, str):
            out.append(spec.parse(item))
        elif isinstance(spec, Lattice):
            out.append(tuple(int(x) for x in item))
        else:
            raise ConfigError(f"cannot read element {item!r}")
    return out


def region_from_json(spec: GroupSpec, data):
    """A window or explicit set.

    Accepted forms: a list of element strings; ``{"kind": "ball", "radius": r}``;
    ``{"kind": "box", "bounds": [[lo, hi], ...]}``;
    ``{"kind": "product", "left": ..., "right": ...}``;
    ``{"kind": "whisker", "disk": r, "whisker": L}``.
    """
    if isinstance(data, list):
        return FiniteSubset(spec, parse_elements(spec, data))
    if not isinstance(data, dict):
        raise ConfigError(f"cannot read region {data!r}")
    kind = data.get("kind")
    try:
        if kind == "ball":
            return Ball(spec, int(data["radius"]))
        if kind == "box":
            return Box(spec, data["bounds"])
        if kind == "product":
            if not isinstance(spec, Product):
                raise ConfigError("product regions need a product group")
            return ProductWindow(
                spec, region_from_json(spec.left, data["left"]), region_from_json(spec.right, data["right"])
            )
        if kind == "whisker":
            return ufo_whisker_shape(int(data["disk"]), int(data["whisker"]), spec)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad region {data!r}: {exc}") from exc
    except UnsupportedOperationError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown region kind {kind!r}")


def region_from_text(spec: GroupSpec, text: str):
    """``ball:R``, ``box:lo:hi,lo:hi`` or a JSON region."""
    text = text.strip()
    if text.startswith(("{", "[")):
        return region_from_json(spec, json.loads(text))
    kind, _, rest = text.partition(":")
    if kind == "ball":
        return Ball(spec, int(rest))
    if kind == "box":
        bounds = [tuple(int(v) for v in part.split(":")) for part in rest.split(",")]
        return Box(spec, bounds)
    raise ConfigError(f"cannot read window {text!r}")


def region_to_json(spec: GroupSpec, R) -> object:
    if isinstance(R, Ball):
        return {"kind": "ball", "radius": R.radius}
    if isinstance(R, Box):
        return {"kind": "box", "bounds": [list(b) for b in R.bounds]}
    if isinstance(R, ProductWindow):
        return {
            "kind": "product",
            "left": region_to_json(spec.left, R.left),
            "right": region_to_json(spec.right, R.right),
        }
    return format_set(spec, R)


# -- patterns and arrows ----------------------------------------------------------


def pattern_to_json(p: Pattern) -> dict:
    spec = p.spec
    return {
        "domain": format_set(spec, p.values),
        "values": {spec.format(g): v for g, v in p.items()},
        "alphabet": p.alphabet,
    }


def pattern_from_json(spec: GroupSpec, data) -> Pattern:
    try:
        values = {spec.parse(k): int(v) for k, v in data["values"].items()}
        alphabet = int(data["alphabet"])
    except (KeyError, TypeError, AttributeError) as exc:
        raise ConfigError(f"bad pattern: {exc}") from exc
    if "domain" in data and set(parse_elements(spec, data["domain"])) != set(values):
        raise ConfigError("pattern domain and values disagree")
    return Pattern(spec, values, alphabet)


def arrows_to_json(x: ArrowAssignment) -> dict:
    return {"arrows": {F2.format(g): list(pair) for g, pair in x.items()}}


def arrows_from_json(data) -> ArrowAssignment:
    try:
        return ArrowAssignment({F2.parse(k): (v[0], v[1]) for k, v in data["arrows"].items()})
    except (KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"bad arrow assignment: {exc}") from exc


def shift_from_json(spec: GroupSpec, data) -> Shift:
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "full":
        return FullShift(spec, int(data["alphabet"]))
    if kind == "color":
        return ColorShift(spec, region_from_json(spec, data["D"]), int(data["colors"]))
    if kind == "pdox":
        if spec != F2:
            raise ConfigError("the two-arrow shift lives on F2; use a lift for products")
        return PdoxShift()
    if kind == "lift":
        if not isinstance(spec, Product):
            raise ConfigError("lifts live on a product group")
        return lift_to_product(shift_from_json(spec.right, data["inner"]), spec.left)
    if kind == "product":
        return ProductShift(shift_from_json(spec, data["left"]), shift_from_json(spec, data["right"]))
    raise ConfigError(f"unknown shift {data!r}")


# -- reports ----------------------------------------------------------------------


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config) -> str:
    return hashlib.sha256(canonical(config).encode()).hexdigest()[:16]


def render_report(command: str, config, result: dict) -> str:
    report = {
        "command": command,
        "config_hash": config_hash(config),
        "version": __version__,
        **result,
    }
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# -- DOT --------------------------------------------------------------------------

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _quote(s: str) -> str:
    return '"' + s.replace('"', r"\"") + '"'


def export_dot(obj, window=None, cap: int = 5000) -> str:
    """A deterministic DOT drawing of a set, pattern, arrow assignment or forcing state.

    Cayley edges inside the window are gray; set members are filled,
    pattern cells are colored by symbol, fixed arrows are solid red and
    deduced arrows dashed red.
    """
    if isinstance(obj, ForcingState):
        spec, marked = F2, obj.fixed.domain | obj.deduced.domain
    elif isinstance(obj, ArrowAssignment):
        spec, marked = F2, obj.domain
    elif isinstance(obj, Pattern):
        spec, marked = obj.spec, obj.domain
    else:
        spec, marked = obj.spec, obj
    if window is None:
        window = marked
    cells = window.elements() if isinstance(window, Window) else spec.sorted(window)
    if len(cells) > cap:
        raise ValueError(f"window has {len(cells)} vertices, above the cap of {cap}")
    inside = set(cells)
    fmt = spec.format
    lines = ["digraph cayley {", "  node [shape=circle, fontsize=10];"]
    for g in cells:
        attrs = [f"label={_quote(fmt(g))}"]
        if isinstance(obj, Pattern) and g in obj:
            v = obj[g]
            attrs = [
                f"label={_quote(f'{fmt(g)}:{v}')}",
                "style=filled",
                f"fillcolor={_quote(_PALETTE[v % len(_PALETTE)])}",
            ]
        elif not isinstance(obj, Pattern) and g in marked:
            attrs.append("style=filled")
            attrs.append('fillcolor="#dddddd"')
        lines.append(f"  {_quote(fmt(g))} [{', '.join(attrs)}];")
    half = len(spec.gens) // 2
    for g in cells:
        for s in spec.gens[:half]:
            h = spec.multiply(s, g)
            if h in inside:
                lines.append(f"  {_quote(fmt(g))} -> {_quote(fmt(h))} [dir=none, color=gray];")
    arrow_sets = []
    if isinstance(obj, ForcingState):
        arrow_sets = [(obj.fixed, "solid"), (obj.deduced, "dashed")]
    elif isinstance(obj, ArrowAssignment):
        arrow_sets = [(obj, "solid")]
    for x, style in arrow_sets:
        for g, _ in x.items():
            for t in x.targets(g):
                lines.append(f"  {_quote(fmt(g))} -> {_quote(fmt(t))} [color=red, style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
