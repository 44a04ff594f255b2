"""``freelip`` command line entry point.

Every subcommand prints one JSON document on stdout. Exit codes:
0 success or consistent verdict, 1 input error, 2 certification failure,
3 violation verdict, 4 inconclusive verdict.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import demos, numeric
from .compactify import embed_image, horolimit, rho
from .dynamics import stability_probe, wap_probe, orbit_closure
from .group_action import (GroupError, action_from_json, check_representation,
                           validate_action)
from .io import InputError, dumps, load_space, read_json
from .lip0 import LipFunctionError, from_json as function_from_json
from .linearize import LinearizeError, commuting_square_report, linearize_map
from .metric_space import EquidistantError, InvalidMetricError, MetricStructureError
from .molecule import MoleculeError, from_json as molecule_from_json
from .oracles import OracleAsymmetryError, builtin, parse_sequence
from .transport_norm import CertificationError, certify, check_isometric_embedding, norm_dual, norm_primal

log = logging.getLogger("freelip")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CERT = 2
EXIT_VIOLATION = 3
EXIT_INCONCLUSIVE = 4

VERDICT_EXIT = {"consistent": EXIT_OK, "violation": EXIT_VIOLATION, "inconclusive": EXIT_INCONCLUSIVE}

SUBCOMMANDS = ("validate", "norm", "embed-check", "linearize", "action-check", "compactify",
               "horolimit", "orbit", "wap", "stability", "demo")


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    numeric: str = numeric.FLOAT
    tol: float | None = None
    seed: int = 0
    output: str = "json"

    def __post_init__(self):
        if self.tol is not None and not self.tol >= 0:
            raise InputError(f"--tol must be nonnegative, got {self.tol}")
        if self.numeric not in numeric.MODES:
            raise InputError(f"numeric mode must be one of {numeric.MODES}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="freelip", description="Exact computation in Lipschitz-free spaces of finite metric spaces.")
    p.add_argument("--format", choices=("json", "table"), default="json", dest="output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser, metavar="SUBCOMMAND")

    def common(sp, tol_default=None):
        sp.add_argument("--tol", type=float, default=tol_default)
        sp.add_argument("--exact", action="store_true", help="use exact rational arithmetic")

    sp = sub.add_parser("validate", help="check the metric axioms")
    sp.add_argument("--space", required=True)
    common(sp)

    sp = sub.add_parser("norm", help="Arens-Eells norm of a molecule")
    sp.add_argument("--space", required=True)
    sp.add_argument("--molecule", required=True)
    sp.add_argument("--mode", choices=("primal", "dual", "certify"), default="certify")
    common(sp)

    sp = sub.add_parser("embed-check", help="check ||chi_x - chi_y|| = d(x, y)")
    sp.add_argument("--space", required=True)
    common(sp)

    sp = sub.add_parser("linearize", help="linear extension of a point map")
    sp.add_argument("--source", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--map", required=True, dest="map_path")
    common(sp)

    sp = sub.add_parser("action-check", help="validate an isometric action")
    sp.add_argument("--space", required=True)
    sp.add_argument("--action", required=True)
    common(sp)

    sp = sub.add_parser("compactify", help="horofunction image and equivariance report")
    sp.add_argument("--space", required=True)
    sp.add_argument("--action")
    common(sp)

    sp = sub.add_parser("horolimit", help="pointwise limit of horofunctions over an oracle")
    sp.add_argument("--oracle", required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--window", required=True)
    sp.add_argument("--tail", type=int, default=5)
    common(sp, 1e-8)

    sp = sub.add_parser("orbit", help="orbit of a function under the dual action")
    sp.add_argument("--space", required=True)
    sp.add_argument("--action", required=True)
    sp.add_argument("--f", required=True)
    common(sp, 0.0)

    sp = sub.add_parser("wap", help="double-limit probe of a matrix coefficient")
    sp.add_argument("--space", required=True)
    sp.add_argument("--action", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--rows", required=True)
    sp.add_argument("--cols", required=True)
    sp.add_argument("--tail", type=int, default=5)
    common(sp, 1e-8)

    sp = sub.add_parser("stability", help="double-limit probe of d(a_i, b_j)")
    sp.add_argument("--oracle", required=True)
    sp.add_argument("--seqA", required=True)
    sp.add_argument("--seqB", required=True)
    sp.add_argument("--tail", type=int, default=5)
    common(sp, 1e-8)

    sp = sub.add_parser("demo", help="run a packaged scenario")
    sp.add_argument("--name")
    sp.add_argument("--list", action="store_true")
    return p


def _config(args) -> RunConfig:
    mode = numeric.EXACT if getattr(args, "exact", False) else numeric.default_mode()
    inputs = {k: v for k, v in vars(args).items()
              if k not in ("subcommand", "output", "seed", "tol", "exact", "verbose")}
    return RunConfig(args.subcommand, inputs, mode, getattr(args, "tol", None), args.seed, args.output)


def _space(cfg: RunConfig, key="space"):
    return load_space(cfg.inputs[key], cfg.numeric)


def _load_doc(path, kind):
    doc = read_json(path)
    if not isinstance(doc, (dict, list)):
        raise InputError(f"{path}: expected a JSON {kind}")
    return doc


def _list_doc(path) -> list:
    doc = read_json(path)
    if not isinstance(doc, list):
        raise InputError(f"{path}: expected a JSON list")
    return doc


def _tol(cfg: RunConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


def cmd_validate(cfg):
    space = _space(cfg)
    from .metric_space import validate
    rep = validate(space, _tol(cfg, 1e-9))
    return rep.to_json(), EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_norm(cfg):
    space = _space(cfg)
    path = cfg.inputs["molecule"]
    try:
        m = molecule_from_json(space, _load_doc(path, "object"))
    except (KeyError, MoleculeError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    mode = cfg.inputs["mode"]
    tol = _tol(cfg, 1e-9)
    if mode == "primal":
        value, plan = norm_primal(space, m)
        return {"primal": numeric.to_json(value), "plan": plan.to_json()}, EXIT_OK
    if mode == "dual":
        value, witness = norm_dual(space, m)
        return {"dual": numeric.to_json(value), "witness": witness.to_json()["values"]}, EXIT_OK
    try:
        cert = certify(space, m, tol)
    except CertificationError as exc:
        log.error("%s", exc)
        return {**exc.certificate.to_json(), "certified": False}, EXIT_CERT
    return {**cert.to_json(), "certified": True}, EXIT_OK


def cmd_embed_check(cfg):
    rep = check_isometric_embedding(_space(cfg), _tol(cfg, 1e-9))
    return rep.to_json(), EXIT_OK if rep.ok else EXIT_CERT


def cmd_linearize(cfg):
    src = _space(cfg, "source")
    dst = _space(cfg, "target")
    path = cfg.inputs["map_path"]
    doc = _load_doc(path, "object")
    mapping = doc.get("map") if isinstance(doc, dict) else None
    if not isinstance(mapping, dict):
        raise InputError(f'{path}: expected {{"map": {{source label: target label}}}}')
    try:
        fbar = linearize_map(src, dst, mapping)
        square = commuting_square_report(src, dst, mapping)
    except (KeyError, LinearizeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return {"map": fbar.to_json(), "commuting_square": square}, EXIT_OK if square["ok"] else EXIT_VIOLATION


def _action(cfg, space):
    path = cfg.inputs["action"]
    try:
        return action_from_json(space, _load_doc(path, "object"))
    except (KeyError, GroupError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_action_check(cfg):
    space = _space(cfg)
    action = _action(cfg, space)
    rep = validate_action(space, action)
    return {**rep.to_json(), "group_order": len(action.group)}, EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_compactify(cfg):
    space = _space(cfg)
    space.require_valid()
    img = embed_image(space)
    doc = {"embedding": img.to_json()}
    code = EXIT_OK if img.ok else EXIT_VIOLATION
    if cfg.inputs.get("action"):
        action = _action(cfg, space)
        valid = validate_action(space, action)
        rep = check_representation(action, [rho(space, a) for a in range(space.n)],
                                   tol=_tol(cfg, 1e-12) if not space.exact else 0)
        doc["action"] = valid.to_json()
        doc["equivariance"] = rep.to_json()
        if not (valid.ok and rep.ok):
            code = EXIT_VIOLATION
    return doc, code


def _oracle_seq(oracle, path):
    try:
        return parse_sequence(oracle, _list_doc(path))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _oracle(name):
    try:
        return builtin(name)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None


def cmd_horolimit(cfg):
    oracle = _oracle(cfg.inputs["oracle"])
    seq = _oracle_seq(oracle, cfg.inputs["seq"])
    window = _oracle_seq(oracle, cfg.inputs["window"])
    verdict = horolimit(oracle, seq, window, _tol(cfg, 1e-8), cfg.inputs["tail"])
    code = {"converged": EXIT_OK, "not_cauchy": EXIT_VIOLATION}.get(verdict.kind, EXIT_INCONCLUSIVE)
    return verdict.to_json(), code


def _function(cfg, space):
    path = cfg.inputs["f"]
    try:
        return function_from_json(space, _load_doc(path, "object"))
    except (KeyError, LipFunctionError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_orbit(cfg):
    space = _space(cfg)
    action = _action(cfg, space)
    f = _function(cfg, space)
    orb = orbit_closure(action, f, _tol(cfg, 0.0))
    return orb.to_json(), EXIT_OK


def cmd_wap(cfg):
    space = _space(cfg)
    action = _action(cfg, space)
    f = _function(cfg, space)
    rows = _list_doc(cfg.inputs["rows"])
    cols = _list_doc(cfg.inputs["cols"])
    try:
        verdict = wap_probe(action, f, cfg.inputs["v"], rows, cols, _tol(cfg, 1e-8), cfg.inputs["tail"])
    except (KeyError, GroupError) as exc:
        raise InputError(str(exc)) from None
    return verdict.to_json(), VERDICT_EXIT[verdict.kind]


def cmd_stability(cfg):
    oracle = _oracle(cfg.inputs["oracle"])
    a = _oracle_seq(oracle, cfg.inputs["seqA"])
    b = _oracle_seq(oracle, cfg.inputs["seqB"])
    verdict = stability_probe(oracle, a, b, _tol(cfg, 1e-8), cfg.inputs["tail"])
    return verdict.to_json(), VERDICT_EXIT[verdict.kind]


def cmd_demo(cfg):
    name = cfg.inputs.get("name")
    if cfg.inputs.get("list") or not name:
        doc = {"demos": sorted(demos.REGISTRY)}
        return doc, EXIT_OK if cfg.inputs.get("list") else EXIT_INPUT
    try:
        report, ok = demos.run(name, cfg.seed)
    except KeyError:
        return {"error": f"unknown demo {name!r}", "demos": sorted(demos.REGISTRY)}, EXIT_INPUT
    return {"demo": name, "ok": ok, "report": report}, EXIT_OK if ok else EXIT_CERT


COMMANDS = {
    "validate": cmd_validate,
    "norm": cmd_norm,
    "embed-check": cmd_embed_check,
    "linearize": cmd_linearize,
    "action-check": cmd_action_check,
    "compactify": cmd_compactify,
    "horolimit": cmd_horolimit,
    "orbit": cmd_orbit,
    "wap": cmd_wap,
    "stability": cmd_stability,
    "demo": cmd_demo,
}


def render_table(doc, prefix="") -> str:
    lines = []
    if isinstance(doc, dict):
        for k in sorted(doc):
            v = doc[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{prefix}{k}:")
                lines.append(render_table(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v, default=str)}")
    elif isinstance(doc, list):
        for v in doc:
            lines.append(f"{prefix}- {json.dumps(v, default=str)}")
    else:
        lines.append(f"{prefix}{doc}")
    return "\n".join(lines)


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="freelip: %(levelname)s: %(message)s", stream=sys.stderr)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        cfg = _config(args)
        doc, code = COMMANDS[args.subcommand](cfg)
    except (InputError, MetricStructureError, EquidistantError) as exc:
        print(f"freelip: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidMetricError as exc:
        print(f"freelip: error: invalid metric: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleAsymmetryError as exc:
        print(f"freelip: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"freelip: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.output == "table":
        sys.stdout.write(render_table(json.loads(dumps(doc))) + "\n")
    else:
        sys.stdout.write(dumps(doc) + "\n")
    return code


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
