"""Command-line front end.

Machine-readable results go to stdout, diagnostics to stderr.  Exit codes:
0 success or valid, 1 invalid (a check failed), 2 search exhausted or no
result, 3 parse or file-format error, 4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath

from . import serialize
from .kernel import ProofError, check_proof
from .pasearch import SearchConfig, Searcher, relational_pa
from .states import FineExtensionError, StateError, validate_state
from .syntax import (
    DEMO_SIGNATURE, PA_SIGNATURE, ParseError, Signature, WitnessRegistry,
    formula_text, parse,
)
from .transform import TranslationError, entail, extract
from .truthmaking import WitnessError, check_mt_witness
from .frames import run_fuzz, trial_states

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_EXHAUSTED = 2
EXIT_PARSE = 3
EXIT_CONFIG = 4

_NAMED_SIGNATURES = {"pa": PA_SIGNATURE, "demo": DEMO_SIGNATURE}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _signature(spec: str) -> Signature:
    if spec in _NAMED_SIGNATURES:
        return _NAMED_SIGNATURES[spec]
    try:
        data = json.loads(FsPath(spec).read_text(encoding="utf-8"))
        return Signature(tuple((r, int(a)) for r, a in data["relations"]),
                         tuple(data.get("constants", ())))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise _UsageError(f"cannot load signature {spec!r}: {exc}") from exc


def _load_registry(path: str | None, sig: Signature) -> WitnessRegistry | None:
    if path is None:
        return None
    return serialize.registry_from_text(FsPath(path).read_text(encoding="utf-8"), sig)


def _read(path: str) -> str:
    return FsPath(path).read_text(encoding="utf-8")


def _emit(obj) -> None:
    sys.stdout.write(serialize.dumps(obj))


def build_parser() -> _Parser:
    top = _Parser(prog="intentic", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--sig", default=None,
                       help="signature: 'pa', 'demo', or a JSON file")
        p.add_argument("--registry", default=None,
                       help="witness-constant registry sidecar (TSV)")

    p = sub.add_parser("parse", help="parse a formula and print it back")
    p.add_argument("formula")
    common(p)

    p = sub.add_parser("check", help="check a proof file")
    p.add_argument("proof")
    p.add_argument("--logic", choices=["classical", "nh"], default="classical")
    common(p)

    p = sub.add_parser("state-check", help="validate a state file structurally")
    p.add_argument("state")
    common(p)

    p = sub.add_parser("mt-check", help="check a made-true witness")
    p.add_argument("witness")
    p.add_argument("--state", required=True)
    p.add_argument("--formula", required=True)
    common(p)

    p = sub.add_parser("translate",
                       help="classical proof -> state, certificate and witness")
    p.add_argument("proof")
    common(p)

    p = sub.add_parser("extract", help="witness -> classical proof")
    p.add_argument("witness")
    p.add_argument("--state", required=True)
    p.add_argument("--formula", required=True)
    common(p)

    pa = sub.add_parser("pa", help="relational arithmetic")
    pasub = pa.add_subparsers(dest="pa_command", required=True)
    p = pasub.add_parser("prove", help="bounded hypothesis-free proof search")
    p.add_argument("formula")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--extra", default=None,
                   help="file of additional axioms, one formula per line")
    p.add_argument("--efq", action="store_true",
                   help="allow ex falso steps in elimination search")
    p.add_argument("--trace", action="store_true",
                   help="write one line per search node to stderr")

    fr = sub.add_parser("frames", help="frame-property harness")
    frsub = fr.add_subparsers(dest="frames_command", required=True)
    p = frsub.add_parser("fuzz", help="seeded frame-property trials")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--branch", type=int, default=3)
    return top


def _cmd_parse(args) -> int:
    sig = _signature(args.sig or "demo")
    reg = _load_registry(args.registry, sig)
    f = parse(args.formula, sig, reg)
    print(formula_text(f))
    return EXIT_OK


def _cmd_check(args) -> int:
    sig = _signature(args.sig or "demo")
    data, reg = serialize.load_envelope(_read(args.proof), sig, "proof",
                                        _load_registry(args.registry, sig))
    proof = serialize.proof_from_data(data["proof"] if "proof" in data else data,
                                      sig, reg)
    logic = "classical" if args.logic == "classical" else "non-hypothetical"
    judgment = check_proof(proof, logic, registry=reg, signature=sig)
    _emit({"assumptions": [formula_text(a) for a in judgment.assumptions],
           "conclusion": formula_text(judgment.conclusion)})
    return EXIT_OK


def _cmd_state_check(args) -> int:
    sig = _signature(args.sig or "demo")
    data, reg = serialize.load_envelope(_read(args.state), sig, "state",
                                        _load_registry(args.registry, sig))
    state = serialize.state_from_data(data["state"] if "state" in data else data,
                                      sig, reg)
    validate_state(state, reg)
    _emit({"valid": True, "size": state.size(), "depth": state.depth()})
    return EXIT_OK


def _load_state_and_witness(args, sig):
    reg = _load_registry(args.registry, sig)
    sdata, reg = serialize.load_envelope(_read(args.state), sig, "state", reg)
    state = serialize.state_from_data(sdata["state"] if "state" in sdata else sdata,
                                      sig, reg)
    wdata, reg = serialize.load_envelope(_read(args.witness), sig, "witness", reg)
    witness = serialize.witness_from_data(
        wdata["witness"] if "witness" in wdata else wdata, sig, reg)
    formula = parse(args.formula, sig, reg)
    return state, witness, formula, reg


def _cmd_mt_check(args) -> int:
    sig = _signature(args.sig or "demo")
    state, witness, formula, reg = _load_state_and_witness(args, sig)
    check_mt_witness(state, formula, witness, reg)
    _emit({"holds": True, "formula": formula_text(formula)})
    return EXIT_OK


def _cmd_translate(args) -> int:
    sig = _signature(args.sig or "demo")
    data, reg = serialize.load_envelope(_read(args.proof), sig, "proof",
                                        _load_registry(args.registry, sig))
    proof = serialize.proof_from_data(data["proof"] if "proof" in data else data,
                                      sig, reg)
    judgment = check_proof(proof, registry=reg, signature=sig)
    _, result = entail(judgment.assumptions, proof.conclusion, proof, reg)
    payload = serialize.translation_to_data(result.state, result.fine_cert,
                                            result.witness)
    payload["gamma"] = [formula_text(g) for g in judgment.assumptions]
    payload["formula"] = formula_text(proof.conclusion)
    _emit(serialize.wrap("translation", payload, reg))
    return EXIT_OK


def _cmd_extract(args) -> int:
    sig = _signature(args.sig or "demo")
    state, witness, formula, reg = _load_state_and_witness(args, sig)
    proof = extract(state, formula, witness, reg)
    _emit(serialize.wrap("proof", {"proof": serialize.proof_to_data(proof)}, reg))
    return EXIT_OK


def _cmd_pa_prove(args) -> int:
    if args.depth < 0:
        raise _UsageError("--depth must be nonnegative")
    sig = PA_SIGNATURE
    extras = []
    if args.extra is not None:
        for line in _read(args.extra).splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                extras.append(parse(line, sig))
    goal = parse(args.formula, sig)
    base = relational_pa(extras=extras)
    cfg = SearchConfig(depth_bound=args.depth, allow_efq=args.efq,
                       trace=args.trace)
    reg = WitnessRegistry()
    result = Searcher(base, cfg, reg).search(goal)
    for line in result.trace:
        print(line, file=sys.stderr)
    if result.proof is None:
        kind = ("depth bound reached"
                if result.depth_limited else "search discipline exhausted")
        print(f"exhausted: {kind} (depth {args.depth})", file=sys.stderr)
        return EXIT_EXHAUSTED
    _emit(serialize.wrap("proof", {"goal": formula_text(goal),
                                   "proof": serialize.proof_to_data(result.proof)},
                         reg))
    return EXIT_OK


def _cmd_frames_fuzz(args) -> int:
    if args.count < 0 or args.depth < 0 or args.branch < 0:
        raise _UsageError("--count, --depth and --branch must be nonnegative")
    report = run_fuzz(args.seed, args.count, args.depth, args.branch)
    print(report.summary())
    if report.failures:
        seed, reason = report.failures[0]
        _, _, u, v, w = trial_states(seed, args.depth, args.branch)
        print(f"first failure: seed {seed}: {reason}", file=sys.stderr)
        sys.stderr.write(serialize.dumps({
            "seed": seed,
            "u": serialize.state_to_data(u),
            "v": serialize.state_to_data(v),
            "w": serialize.state_to_data(w)}))
        return EXIT_INVALID
    return EXIT_OK


_COMMANDS = {
    "parse": _cmd_parse,
    "check": _cmd_check,
    "state-check": _cmd_state_check,
    "mt-check": _cmd_mt_check,
    "translate": _cmd_translate,
    "extract": _cmd_extract,
}


def run(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "pa":
            return _cmd_pa_prove(args)
        if args.command == "frames":
            return _cmd_frames_fuzz(args)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, serialize.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ProofError, StateError, WitnessError, FineExtensionError,
            TranslationError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
