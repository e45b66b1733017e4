"""Command-line front end.

Every subcommand reads a JSON config, runs one computation and writes a
JSON report with sorted keys, so equal configs give identical bytes.
Exit status: 0 on success, 1 when the verdict contradicts the config's
``expect`` field (or a checked claim fails), 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .groups import F2, Z, Ball, FiniteSubset, Product, subgroup_from_json
from .io import (
    ConfigError,
    arrows_from_json,
    arrows_to_json,
    export_dot,
    format_set,
    parse_elements,
    parse_group,
    pattern_from_json,
    pattern_to_json,
    region_from_json,
    region_from_text,
    render_report,
    shift_from_json,
)
from .minimal import (
    CLAIMS,
    ProductShape,
    build_y_window,
    make_recipe,
    minimality_gaps,
    random_claims_instance,
    verify_ji_claims,
)
from .patterns import (
    EnumerationTooLarge,
    Infeasible,
    PreconditionError,
    bn_glue_via_components,
    glue,
    pattern_set,
    sorted_patterns,
)
from .rng import derive_rng
from .shifts import (
    build_gadget,
    color_sample,
    pdox_extend,
    pdox_non_irreducible_witness,
    pdox_propagate,
    pdox_validate,
)
from .spaced import greedy_maximal_spaced, is_spaced, is_window_maximal, ufo_falsify

COMMANDS = (
    "ufo-search",
    "spaced-max",
    "pdox-extend",
    "pdox-force",
    "pdox-witness",
    "glue",
    "color-sample",
    "build-minimal",
    "verify-claims",
    "pattern-set",
)


class Outcome:
    def __init__(self, result: dict, status: int = 0, dot_object=None, dot_window=None):
        self.result = result
        self.status = status
        self.dot_object = dot_object
        self.dot_window = dot_window


def _window(cfg, args, spec, key="window"):
    if args.window:
        return region_from_text(spec, args.window)
    if key not in cfg:
        raise ConfigError(f"missing {key!r}")
    return region_from_json(spec, cfg[key])


def _expect(cfg, feasible: bool) -> int:
    want = cfg.get("expect")
    if want is None:
        return 0
    if want not in ("feasible", "infeasible"):
        raise ConfigError("expect must be 'feasible' or 'infeasible'")
    return 0 if (want == "feasible") == feasible else 1


def _infeasible_json(spec, exc: Infeasible) -> dict:
    w = exc.witness
    if isinstance(w, FiniteSubset):
        w = format_set(w.spec, w)
    elif w is not None:
        w = spec.format(w)
    return {"verdict": "Infeasible", "reason": exc.reason, "witness": w}


# -- subcommands ------------------------------------------------------------------


def cmd_ufo_search(cfg, args) -> Outcome:
    spec = parse_group(cfg.get("group", "Z2"))
    V = region_from_json(spec, cfg["V"])
    delta = subgroup_from_json(spec, cfg.get("delta"))
    window = _window(cfg, args, spec)
    budget = args.budget if args.budget is not None else int(cfg.get("budget", 200))
    rep = ufo_falsify(V, delta, window, budget, args.seed)
    result = {"verdict": rep.verdict, "trials_used": rep.trials_used}
    if rep.found:
        result["counterexample"] = format_set(spec, rep.counterexample)
        result["missed_coset_representative"] = spec.format(rep.missed_coset)
    return Outcome(result, dot_object=rep.counterexample, dot_window=window)


def cmd_spaced_max(cfg, args) -> Outcome:
    spec = parse_group(cfg.get("group", "Z"))
    U = region_from_json(spec, cfg["U"])
    window = _window(cfg, args, spec)
    seed_set = parse_elements(spec, cfg.get("seed_set", []))
    S = greedy_maximal_spaced(U, window, seed_set)
    result = {
        "set": format_set(spec, S),
        "size": len(S),
        "spaced": is_spaced(S, U),
        "window_maximal": is_window_maximal(S, U, window),
    }
    return Outcome(result, dot_object=S, dot_window=window)


def cmd_pdox_extend(cfg, args) -> Outcome:
    fixed = arrows_from_json(cfg.get("fixed", {"arrows": {}}))
    window = _window(cfg, args, F2)
    try:
        x = pdox_extend(fixed, window)
    except Infeasible as exc:
        return Outcome(_infeasible_json(F2, exc), _expect(cfg, False))
    result = {"verdict": "Feasible", **arrows_to_json(x), "valid": pdox_validate(x)}
    return Outcome(result, _expect(cfg, True), dot_object=x, dot_window=window)


def cmd_pdox_force(cfg, args) -> Outcome:
    if "gadget" in cfg:
        k = int(cfg["gadget"].get("k", 2))
        gadget = build_gadget("", "a", k)
        fixed = gadget.arrows
        default_window = Ball(F2, 2 * k + 2)
    else:
        fixed = arrows_from_json(cfg["fixed"])
        gadget = None
        default_window = None
    window = region_from_text(F2, args.window) if args.window else (
        region_from_json(F2, cfg["window"]) if "window" in cfg else default_window
    )
    if window is None:
        raise ConfigError("missing 'window'")
    state = pdox_propagate(fixed, window)
    result = {
        "status": state.status,
        "fixed": arrows_to_json(fixed)["arrows"],
        "deduced": arrows_to_json(state.deduced)["arrows"],
        "deduction_order": [F2.format(g) for g in state.order],
        "contradiction": None if state.contradiction is None else F2.format(state.contradiction),
    }
    if gadget is not None:
        root = gadget.root_v
        result["root_forced_to_center"] = root in state.deduced and gadget.root_u in state.deduced.targets(root)
    return Outcome(result, dot_object=state, dot_window=window)


def cmd_pdox_witness(cfg, args) -> Outcome:
    n = int(cfg["n"])
    w = pdox_non_irreducible_witness(n)
    result = {
        "n": n,
        "k": w.k,
        "S0": format_set(F2, w.S0),
        "x0": arrows_to_json(w.x0)["arrows"],
        "S1": format_set(F2, w.S1),
        "x1": arrows_to_json(w.x1)["arrows"],
        "distance": min(F2.distance(s, t) for s in w.S0 for t in w.S1),
        "glue": _infeasible_json(F2, w.infeasible),
    }
    return Outcome(result, dot_object=w.x0.union(w.x1), dot_window=w.window)


def cmd_glue(cfg, args) -> Outcome:
    if "witness" in cfg:
        w = pdox_non_irreducible_witness(int(cfg["witness"]))
        spec = F2
        shift = shift_from_json(spec, {"kind": "pdox"})
        pieces = [w.x0.to_pattern(), w.x1.to_pattern()]
        window = region_from_text(spec, args.window) if args.window else w.window
    else:
        spec = parse_group(cfg.get("group", "F2"))
        shift = shift_from_json(spec, cfg["shift"])
        pieces = [pattern_from_json(spec, p) for p in cfg["pieces"]]
        window = _window(cfg, args, spec)
    try:
        if "bn" in cfg:
            y = bn_glue_via_components(shift, pieces, int(cfg["bn"]), window)
        else:
            y = glue(shift, pieces, window)
    except Infeasible as exc:
        return Outcome(_infeasible_json(spec, exc), _expect(cfg, False))
    result = {"verdict": "Glued", "pattern": pattern_to_json(y)}
    return Outcome(result, _expect(cfg, True), dot_object=y, dot_window=window)


def cmd_color_sample(cfg, args) -> Outcome:
    spec = parse_group(cfg.get("group", "F2"))
    D = region_from_json(spec, cfg["D"])
    window = _window(cfg, args, spec)
    try:
        p = color_sample(D, int(cfg["colors"]), window, args.seed, spec)
    except Infeasible as exc:
        return Outcome(_infeasible_json(spec, exc), _expect(cfg, False))
    return Outcome({"verdict": "Colored", "pattern": pattern_to_json(p)}, _expect(cfg, True), p, window)


def cmd_build_minimal(cfg, args) -> Outcome:
    spec = parse_group(cfg.get("group", "Z"))
    shift = shift_from_json(spec, cfg.get("shift", {"kind": "full", "alphabet": 2}))
    E = region_from_json(spec, cfg["E"])
    D = region_from_json(spec, cfg["D"])
    delta = subgroup_from_json(spec, cfg.get("delta"))
    recipe_window = region_from_json(spec, cfg["recipe_window"])
    recipe = make_recipe(shift, E, D, delta, recipe_window, cfg.get("mode", "UDU"))
    window = _window(cfg, args, spec)
    samples = int(cfg.get("samples", 1))
    ys, runs = [], []
    for i in range(samples):
        y, T = build_y_window(recipe, window, derive_rng(args.seed, i).getrandbits(63))
        ys.append(y)
        runs.append({"anchors": format_set(spec, T), "configuration": pattern_to_json(y)})
    ref = pattern_set(shift, E)
    gaps = minimality_gaps(ys, delta, E, ref, window)
    result = {
        "Q": format_set(spec, recipe.Q),
        "alpha": pattern_to_json(recipe.alpha),
        "runs": runs,
        "minimality_certificate": not gaps,
        "gaps": [{"sample": i, "pattern": pattern_to_json(p)} for i, p, _ in gaps],
    }
    return Outcome(result, 1 if gaps else 0, ys[0], window)


def cmd_verify_claims(cfg, args) -> Outcome:
    spec = Product(Z, F2)
    r, n = int(cfg.get("r", 1)), int(cfg.get("n", 1))
    u, d = int(cfg.get("u", 1)), int(cfg.get("d", 0))
    shape = ProductShape(spec, tuple((k,) for k in range(-u, u + 1)), r, tuple((k,) for k in range(-d, d + 1)), n)
    mode = cfg.get("mode", "UD2U")
    count = args.budget if args.budget is not None else int(cfg.get("instances", 10))
    summary = {c: 0 for c in CLAIMS}
    entries = []
    for i in range(count):
        inst = random_claims_instance(shape, derive_rng(args.seed, i), mode=mode)
        rep = verify_ji_claims(inst.S_list, inst.B_list, inst.B_extra, shape)
        for f in rep.failures():
            summary[f.claim] += 1
            entries.append({"instance": i, "claim": f.claim, "verdict": "fail", "witness": repr(f.witness)})
    result = {"instances": count, "mode": mode, "failures": summary, "entries": entries}
    status = 0 if (mode != "UD2U" or not entries) else 1
    return Outcome(result, status)


def cmd_pattern_set(cfg, args) -> Outcome:
    spec = parse_group(cfg.get("group", "F2"))
    shift = shift_from_json(spec, cfg["shift"])
    U = region_from_json(spec, cfg["U"])
    window = region_from_json(spec, cfg["window"]) if "window" in cfg else None
    pats = sorted_patterns(pattern_set(shift, U, window, cap=int(cfg.get("cap", 200_000))))
    return Outcome({"count": len(pats), "patterns": [list(p.key()) for p in pats], "domain": format_set(spec, U)})


HANDLERS = {
    "ufo-search": cmd_ufo_search,
    "spaced-max": cmd_spaced_max,
    "pdox-extend": cmd_pdox_extend,
    "pdox-force": cmd_pdox_force,
    "pdox-witness": cmd_pdox_witness,
    "glue": cmd_glue,
    "color-sample": cmd_color_sample,
    "build-minimal": cmd_build_minimal,
    "verify-claims": cmd_verify_claims,
    "pattern-set": cmd_pattern_set,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="report path (default: stdout)")
        p.add_argument("--dot", action="store_true", help="also write a DOT drawing")
        p.add_argument("--budget", type=int, help="trial or instance budget")
        p.add_argument("--window", help="window override: ball:R, box:lo:hi,... or JSON")
    return parser


def dispatch(args) -> int:
    try:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        outcome = HANDLERS[args.command](cfg, args)
    except (OSError, json.JSONDecodeError, ConfigError, KeyError, TypeError, ValueError,
            PreconditionError, EnumerationTooLarge) as exc:
        print(f"subdyn {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    effective = {"config": cfg, "seed": args.seed, "budget": args.budget, "window": args.window}
    text = render_report(args.command, effective, outcome.result)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.dot and outcome.dot_object is not None:
        dot = export_dot(outcome.dot_object, outcome.dot_window)
        if args.out:
            Path(args.out).with_suffix(".dot").write_text(dot)
        else:
            sys.stdout.write(dot)
    return outcome.status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return dispatch(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
