"""Command-line front end: ``ringlab {check,classify,gh,homology,witness}``.

Exit codes: 0 when the command ran (verdicts are in the report), 1 when an
assertive check failed (``gh --expect``, a classify consistency alarm),
2 for input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .complexes import ChainComplex, ComplexError, free_complex, homology, sphere
from .config import BudgetExceeded
from .gh import (
    PreconditionError,
    classify_ring,
    gh_search,
    nfold_gh_test,
    strong_gh_test,
    verify_witness,
    witness_from_ext,
)
from .modules import FinModule, ModuleMap, Presentation, ext1, free_module, module_from_presentation
from .pool import enumerate_pool
from .predicates import is_vnr, ring_predicates
from .report import ReportEnvelope, ResultCache, cache_key
from .rings import RingTable, build_ring, verify_axioms
from .ringspec import SpecError, parse_ring_spec


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# helpers


def _ring(text: str, max_elements: int | None) -> RingTable:
    return build_ring(parse_ring_spec(text), max_elements)


def _structure(M: FinModule) -> str:
    if M.size == 1:
        return "0"
    return " + ".join(f"Z/{f}" for f in M.factors)


def _phi_tuple(phi: dict) -> list[int]:
    """Generator images listed from the top degree down, e.g. ``(2, 0)``."""
    out = []
    for n in sorted(phi, key=int, reverse=True):
        out += list(phi[n])
    return out


def _matrix(text: str, what: str) -> np.ndarray:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{what}: not valid JSON ({e.msg} at column {e.colno})")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows) or not rows:
        raise InputError(f"{what}: expected a non-empty list of rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"{what}: rows have different lengths")
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), widths.pop())


def _presentation(R: RingTable, text: str, what: str) -> Presentation:
    D = _matrix(text, what)
    try:
        return Presentation(R, D.shape[0], D)
    except ValueError as e:
        raise InputError(f"{what}: {e}")


def _term(R: RingTable, spec, n: int):
    """Term descriptor -> (module, free rank or None)."""
    if isinstance(spec, list) and len(spec) == 2 and spec[0] == "free":
        spec = {"free": spec[1]}
    if isinstance(spec, int):
        spec = {"free": spec}
    if not isinstance(spec, dict):
        raise InputError(f"term {n}: expected [\"free\", k] or a module table")
    if "free" in spec:
        k = int(spec["free"])
        if k < 0:
            raise InputError(f"term {n}: negative rank")
        return free_module(R, k), k
    try:
        add = np.asarray(spec["add"], dtype=np.int64)
        act = np.asarray(spec["act"], dtype=np.int64)
        gens = spec.get("generators")
    except KeyError as e:
        raise InputError(f"term {n}: module table needs {e.args[0]!r}")
    if gens is None:
        gens = range(1, add.shape[0])
    try:
        M = FinModule(R, add, act, list(gens), {"kind": "table"})
    except ValueError as e:
        raise InputError(f"term {n}: {e}")
    return M, None


def load_complex(data: dict, max_elements: int | None = None) -> ChainComplex:
    """Build a complex from the JSON file format ``{ring, degrees, terms, diffs}``."""
    for key in ("ring", "degrees", "terms"):
        if key not in data:
            raise InputError(f"complex file is missing {key!r}")
    R = _ring(data["ring"], max_elements)
    lo, hi = (int(v) for v in data["degrees"])
    if hi < lo:
        raise InputError("degrees must be [lo, hi] with lo <= hi")
    raw = data["terms"]
    if isinstance(raw, list):
        if len(raw) != hi - lo + 1:
            raise InputError(f"expected {hi - lo + 1} terms for degrees {lo}..{hi}, got {len(raw)}")
        raw = {lo + i: t for i, t in enumerate(raw)}
    else:
        raw = {int(k): t for k, t in raw.items()}
    stray = [n for n in raw if not lo <= n <= hi]
    if stray:
        raise InputError(f"terms outside the degree range: {stray}")
    terms, ranks = {}, {}
    for n, t in raw.items():
        terms[n], ranks[n] = _term(R, t, n)
    diffs_raw = {int(k): v for k, v in data.get("diffs", {}).items()}
    for n in diffs_raw:
        if not (lo < n <= hi):
            raise InputError(f"differential d_{n} leaves the degree range {lo}..{hi}")
    if all(r is not None for r in ranks.values()):
        mats = {}
        for n, D in diffs_raw.items():
            D = np.asarray(D, dtype=np.int64)
            want = (ranks.get(n - 1, 0), ranks.get(n, 0))
            if D.size != want[0] * want[1]:
                raise InputError(f"d_{n} must be a {want[0]} x {want[1]} matrix")
            mats[n] = D.reshape(want)
        return free_complex(R, ranks, mats)
    diffs = {}
    for n, v in diffs_raw.items():
        src, tgt = terms.get(n, free_module(R, 0)), terms.get(n - 1, free_module(R, 0))
        images = v["images"] if isinstance(v, dict) else v
        try:
            diffs[n] = ModuleMap.from_images(src, tgt, [int(x) for x in images])
        except (ValueError, IndexError) as e:
            raise InputError(f"d_{n}: {e}")
    return ChainComplex(R, terms, diffs)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})")


# ---------------------------------------------------------------------------
# commands; each returns (report, exit code)


def cmd_check(args) -> tuple[ReportEnvelope, int]:
    R = _ring(args.spec, args.max_elements)
    ax = verify_axioms(R, max_elements=max(256, R.size))
    preds = ring_predicates(R)
    vnr = is_vnr(R)
    verdicts = {
        "size": R.size,
        "axioms": ax.ok,
        "vnr": vnr.holds,
        "radical": [int(x) for x in preds.jacobson_radical],
        "semisimple": preds.is_semisimple,
        "local": preds.is_local,
        "reduced": preds.is_reduced,
        "simple": preds.is_simple,
    }
    witnesses = {}
    if ax.failures:
        witnesses["axioms"] = ax.failures
    if not vnr.holds:
        witnesses["non_regular_element"] = vnr.witness
    if preds.witnesses:
        witnesses["predicates"] = preds.witnesses
    return ReportEnvelope("check", R.spec, {}, None, verdicts, witnesses), 0


def cmd_classify(args) -> tuple[ReportEnvelope, int]:
    R = _ring(args.spec, args.max_elements)
    rep = classify_ring(R, args.max_rank, args.span, args.mat_bound, args.fp_bound, args.ws_bound, args.seed)
    verdicts = dict(rep.predicates)
    verdicts["gh"] = rep.gh["holds"]
    verdicts["strong_gh"] = rep.strong_gh["holds"]
    verdicts["consistency"] = rep.consistency
    verdicts["red_alert"] = rep.red_alert
    witnesses = {}
    if rep.gh["witnesses"]:
        witnesses["gh"] = rep.gh["witnesses"][0]
    if rep.strong_gh.get("witness"):
        witnesses["strong_gh"] = rep.strong_gh["witness"]
    if rep.fp_injective_witness:
        witnesses["fp_injective"] = rep.fp_injective_witness
    if rep.free_target_witness:
        witnesses["free_target"] = rep.free_target_witness
    report = ReportEnvelope("classify", R.spec, rep.bounds, args.seed, verdicts, witnesses)
    return report, 1 if rep.red_alert else 0


def cmd_gh(args) -> tuple[ReportEnvelope, int]:
    R = _ring(args.spec, args.max_elements)
    mode = "sampled" if args.samples is not None else "exhaustive"
    bounds = {"max_rank": args.max_rank, "span": args.span, "mode": mode}
    if mode == "sampled":
        bounds["samples"] = args.samples
    pool = enumerate_pool(R, args.max_rank, args.span) if mode == "exhaustive" or args.strong or args.nfold else None
    v = gh_search(R, args.max_rank, args.span, mode, samples=args.samples or 0, seed=args.seed, pool=pool)
    verdicts = {"holds": v.holds, "pairs_tested": v.pairs_tested, "qualified": v.qualified}
    witnesses = {}
    if v.witnesses:
        w = asdict(v.witnesses[0])
        w["phi_tuple"] = _phi_tuple(w["phi"])
        witnesses["gh"] = w
    if args.strong:
        bounds["strong"] = True
        s = strong_gh_test(R, args.max_rank, args.span, pool=pool)
        verdicts["strong_holds"] = s.holds
        verdicts["strong_pairs_tested"] = s.pairs_tested
        if s.witness:
            witnesses["strong"] = s.witness
    if args.nfold:
        bounds["nfold"] = args.nfold
        nv = nfold_gh_test(R, args.nfold, args.max_rank, args.span, pool=pool)
        verdicts["nfold_holds"] = nv.holds
        verdicts["nfold_chains_tested"] = nv.chains_tested
        if nv.witness:
            witnesses["nfold"] = nv.witness
    code = 0
    if args.expect is not None:
        asserted = [v.holds] + ([verdicts["strong_holds"]] if args.strong else [])
        want = args.expect == "holds"
        if any(a != want for a in asserted):
            code = 1
    return ReportEnvelope("gh", R.spec, bounds, args.seed if mode == "sampled" else None, verdicts, witnesses), code


def cmd_homology(args) -> tuple[ReportEnvelope, int]:
    data = _read_json(args.file)
    P = load_complex(data, args.max_elements)
    HD = homology(P)
    H = {str(n): {"order": HD.H[n].size, "structure": _structure(HD.H[n])} for n in P.degrees}
    verdicts = {"perfect": P.perfect, "acyclic": HD.is_zero(), "homology": H,
                "degrees": [P.lo, P.hi] if P.hi >= P.lo else []}
    return ReportEnvelope("homology", P.ring.spec, {}, None, verdicts, {}), 0


def cmd_witness(args) -> tuple[ReportEnvelope, int]:
    R = _ring(args.spec, args.max_elements)
    F = _presentation(R, args.presentation, "--presentation")
    n = args.degree
    if args.target_file:
        Q = load_complex(_read_json(args.target_file), args.max_elements)
        if Q.ring.spec != R.spec:
            raise InputError(f"target complex is over {Q.ring.spec}, not {R.spec}")
        target = {"file": args.target_file}
    else:
        M = module_from_presentation(_presentation(R, args.target, "--target")) if args.target else free_module(R, 1)
        Q = sphere(M, n)
        target = {"sphere": n, "module": _structure(M), "relations": args.target}
    Hn = Q.homology.H.get(n)
    if Hn is None or Hn.size == 1:
        e = None
    else:
        e = ext1(F, Hn)
    bounds = {"degree": n}
    verdicts = {"ext_order": e.order if e is not None else 1, "target": target}
    witnesses = {}
    if e is None or e.is_zero:
        verdicts["witness_found"] = False
        return ReportEnvelope("witness", R.spec, bounds, None, verdicts, witnesses), 0
    try:
        P, phi = witness_from_ext(F, Q, n, e.cocycles[0])
    except PreconditionError as err:
        raise InputError(str(err))
    tr = verify_witness(P, Q, phi)
    verdicts["witness_found"] = True
    verdicts["verified"] = tr["verified"]
    witnesses["chain_map"] = {"P": {"degrees": [P.lo, P.hi], "diffs": {str(n): F.D}},
                              "phi": phi.describe(), "transcript": tr}
    return ReportEnvelope("witness", R.spec, bounds, None, verdicts, witnesses), 0


# ---------------------------------------------------------------------------
# output and entry point


def render(report: ReportEnvelope) -> str:
    d = report.as_dict()
    lines = [f"{d['command']} {d['ring']}"]
    if d["bounds"]:
        lines.append("bounds: " + ", ".join(f"{k}={v}" for k, v in d["bounds"].items()))
    for k, v in d["verdicts"].items():
        lines.append(f"  {k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    for k, v in d["witnesses"].items():
        lines.append(f"  witness[{k}]: {json.dumps(v, sort_keys=True)}")
    lines.append(f"time: {d['timing']:.2f}s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ringlab", description="Homological experiments over finite rings.")
    ap.add_argument("--version", action="version", version=f"ringlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--max-elements", type=int, default=None,
                        help="ring size cap (default: RINGLAB_MAX_ELEMENTS or 64)")
    common.add_argument("--cache-dir", default=None, help="store and reuse reports here (RINGLAB_CACHE_DIR)")
    common.add_argument("--no-cache", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="ring axioms and basic predicates")
    p.add_argument("spec")
    p.set_defaults(func=cmd_check, cacheable=True)

    p = sub.add_parser("classify", parents=[common], help="flatness, FP-injectivity and GH side by side")
    p.add_argument("spec")
    p.add_argument("--max-rank", type=int, default=1)
    p.add_argument("--span", type=int, default=2)
    p.add_argument("--mat-bound", type=int, default=2)
    p.add_argument("--fp-bound", type=int, default=1)
    p.add_argument("--ws-bound", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classify, cacheable=True)

    p = sub.add_parser("gh", parents=[common], help="search for generating-hypothesis counterexamples")
    p.add_argument("spec")
    p.add_argument("--max-rank", type=int, default=1)
    p.add_argument("--span", type=int, default=2)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate the whole pool (default)")
    mode.add_argument("--samples", type=int, default=None, help="random pairs instead of the full pool")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strong", action="store_true", help="also test bijectivity of [P,Q] -> Hom(H_*P, H_*Q)")
    p.add_argument("--nfold", type=int, default=None, metavar="N", help="also test composites of N maps")
    p.add_argument("--expect", choices=("holds", "fails"), default=None, help="exit 1 if the verdict differs")
    p.set_defaults(func=cmd_gh, cacheable=True)

    p = sub.add_parser("homology", parents=[common], help="homology of a complex file")
    p.add_argument("file")
    p.set_defaults(func=cmd_homology, cacheable=False)

    p = sub.add_parser("witness", parents=[common], help="chain map built from a nonzero Ext class")
    p.add_argument("spec")
    p.add_argument("--presentation", required=True, help="relation matrix of F as JSON rows, e.g. '[[2]]'")
    tgt = p.add_mutually_exclusive_group()
    tgt.add_argument("--target", default=None, help="relation matrix of M; the target is S^n(M) (default M = R)")
    tgt.add_argument("--target-file", default=None, help="target complex file")
    p.add_argument("--degree", type=int, default=0)
    p.set_defaults(func=cmd_witness, cacheable=False)
    return ap


def _cache(args) -> ResultCache | None:
    if args.no_cache or not getattr(args, "cacheable", False):
        return None
    root = args.cache_dir or os.environ.get("RINGLAB_CACHE_DIR")
    return ResultCache(root) if root else None


def _cache_bounds(args) -> dict:
    skip = {"json", "cache_dir", "no_cache", "func", "cacheable", "command", "spec", "max_elements"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        cache = _cache(args)
        key = None
        if cache is not None:
            canon = str(parse_ring_spec(args.spec))
            key = cache_key(args.command, canon, _cache_bounds(args), None)
            hit = cache.get(key)
            if hit is not None:
                print("(cached)", file=sys.stderr)
                _emit(hit, args.json)
                return _exit_from(args, hit)
        report, code = args.func(args)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ComplexError as e:
        print(f"error: {e}", file=sys.stderr)
        if e.element is not None:
            print(f"witness: degree {e.degree}, element {e.element}", file=sys.stderr)
        return 2
    except (InputError, BudgetExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    report.timing = time.perf_counter() - t0
    if cache is not None and key is not None:
        if cache.put(key, report) is None:
            print("warning: cache write failed", file=sys.stderr)
    _emit(report, args.json)
    return code


def _exit_from(args, report: ReportEnvelope) -> int:
    v = report.verdicts
    if args.command == "classify":
        return 1 if v.get("red_alert") else 0
    if args.command == "gh" and args.expect is not None:
        want = args.expect == "holds"
        asserted = [v["holds"]] + ([v["strong_holds"]] if "strong_holds" in v else [])
        return 1 if any(a != want for a in asserted) else 0
    return 0


def _emit(report: ReportEnvelope, as_json: bool) -> None:
    print(report.to_json() if as_json else render(report))


if __name__ == "__main__":
    sys.exit(main())
