"""Command line front end.

Exit codes: 0 success, 1 a check failed, 2 unreadable or malformed input
or unwritable output, 3 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .category import build_flow_category, fiber, left_fiber, right_fiber, verify_fiber_contractible
from .cw import FacePoset, load_complex, validate_regular
from .errors import CapacityError, EmptyComplexError, FlowcatError, NotMorseError, ParseError
from .flowpaths import flow_poset
from .homology import DEFAULT_SIMPLEX_CAP
from .morse import (faithful_function, greedy_matching, is_acyclic, is_discrete_morse,
                    is_faithful, load_matching, load_morse, matching_from_function)
from .verify import FIXTURES, Context, fixture_path, homology_chain, run_suite

log = logging.getLogger("flowcat")


class CheckFailed(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None
    kind: str
    matching: str | None
    morse: str | None
    greedy_seed: int | None
    fixture: str | None
    out: str | None
    max_dim: int | None
    cap_paths: int
    cap_simplices: int
    as_json: bool


def _source_count(cfg: RunConfig) -> int:
    return sum(x is not None for x in (cfg.matching, cfg.morse, cfg.greedy_seed))


def load_inputs(cfg: RunConfig):
    """Face poset, matching, and the Morse function when one was given."""
    if cfg.fixture:
        cx, kind, mt = FIXTURES[cfg.fixture]
        fp = load_complex(fixture_path(cx), kind)
        if _source_count(cfg) == 0:
            return fp, load_matching(fp, fixture_path(mt)), None
    else:
        fp = load_complex(cfg.input, cfg.kind)
    if cfg.matching is not None:
        return fp, load_matching(fp, cfg.matching), None
    if cfg.morse is not None:
        f = load_morse(fp, cfg.morse)
        return fp, None, f
    return fp, greedy_matching(fp, cfg.greedy_seed), None


def _labels(fp: FacePoset, cells) -> str:
    return ", ".join(fp.label(c) for c in cells)


def _emit(cfg, lines, data):
    if cfg.as_json:
        print(json.dumps(data, indent=1, sort_keys=True))
    else:
        print("\n".join(lines))


def _require_acyclic(fp, m):
    ok, cycle = is_acyclic(m)
    if not ok:
        raise CheckFailed("matching is not acyclic; closed path through %s" % _labels(fp, cycle))


def _matching(fp, m, f):
    if m is None:
        m = matching_from_function(f)
    return m


def cmd_check(cfg: RunConfig) -> int:
    fp, m, f = load_inputs(cfg)
    failed = False
    lines, data = [], {}
    reg, diag = validate_regular(fp)
    data["regular"] = {"ok": reg, "diagnostics": diag}
    lines.append("regular: %s" % str(reg).lower())
    lines += ["  " + d for d in diag]
    failed |= not reg
    if f is not None:
        morse_ok, bad = is_discrete_morse(f)
        data["discrete_morse"] = {"ok": morse_ok, "offending": [fp.ids[c] for c in bad]}
        lines.append("discrete Morse: %s" % str(morse_ok).lower())
        if not morse_ok:
            lines.append("  offending cells: %s" % _labels(fp, bad))
            _emit(cfg, lines, data)
            return 1
        faithful = is_faithful(f)
        data["faithful"] = faithful
        lines.append("faithful: %s" % str(faithful).lower())
        m = matching_from_function(f)
    ok, cycle = is_acyclic(m)
    data["acyclic"] = {"ok": ok, "witness": [fp.ids[d] for d in cycle]}
    data["critical"] = [fp.ids[c] for c in m.critical]
    data["pairs"] = [[fp.ids[d], fp.ids[u]] for d, u in m.pairs]
    line = "acyclic: %s" % str(ok).lower()
    if ok:
        line += "; critical: %s" % _labels(fp, m.critical)
    else:
        line += "; closed gradient path: %s" % _labels(fp, cycle)
    lines.append(line)
    failed |= not ok
    _emit(cfg, lines, data)
    return 1 if failed else 0


def cmd_flowpaths(cfg: RunConfig) -> int:
    fp, m, f = load_inputs(cfg)
    m = _matching(fp, m, f)
    _require_acyclic(fp, m)
    full = flow_poset(m, cap=cfg.cap_paths)
    red = flow_poset(m, reduced_only=True, paths=full.paths)
    tally = {fp.ids[c]: [len(full.by_target()[c]), len(red.by_target()[c])] for c in m.critical}
    lines = ["|FP| = %d" % len(full), "|FPbar| = %d" % len(red)]
    lines += ["  target %s: %d paths, %d reduced" % (fp.label(fp.index[c]), a, b)
              for c, (a, b) in tally.items()]
    data = {"paths": len(full), "reduced": len(red), "by_target": tally,
            "covers": len(full.poset.cover_pairs()), "reduced_covers": len(red.poset.cover_pairs())}
    if cfg.out:
        out = _outdir(cfg)
        _write(out / "flowpaths.json", full.to_json())
        _write(out / "fp.dot", full.poset.to_dot("FP"))
        _write(out / "fpbar.dot", red.poset.to_dot("FPbar"))
        lines.append("wrote flowpaths.json, fp.dot, fpbar.dot to %s" % out)
    _emit(cfg, lines, data)
    return 0


def cmd_category(cfg: RunConfig) -> int:
    fp, m, f = load_inputs(cfg)
    m = _matching(fp, m, f)
    _require_acyclic(fp, m)
    lines, data = [], {}
    for reduced in (False, True):
        fc = build_flow_category(m, reduced, cap=cfg.cap_paths)
        name = "reduced" if reduced else "full"
        homs = {"%s -> %s" % (fp.ids[a], fp.ids[b]): len(p)
                for (a, b), p in fc.homs.items() if a != b and len(p)}
        data[name] = homs
        lines.append("%s flow category: %d objects" % (name, len(fc.objects)))
        lines += ["  hom(%s) has %d morphisms" % (k, v) for k, v in homs.items()]
        if cfg.out:
            _write(_outdir(cfg) / ("category_%s.json" % name), fc.to_json())
    _emit(cfg, lines, data)
    return 0


def cmd_fibers(cfg: RunConfig) -> int:
    fp, m, f = load_inputs(cfg)
    m = _matching(fp, m, f)
    _require_acyclic(fp, m)
    g = faithful_function(m)
    lines, data, failed = [], {}, False
    for reduced in (False, True):
        fc = build_flow_category(m, reduced, cap=cfg.cap_paths)
        name = "reduced" if reduced else "full"
        for c in m.critical:
            rf = right_fiber(fc, c)
            ok, clog = verify_fiber_contractible(m, c, g, reduced, flow=fc.flow)
            failed |= not ok
            entry = {"fiber": len(fiber(fc, c)), "right": len(rf), "left": len(left_fiber(fc, c)),
                     "contractible": ok, "log": clog.lines()}
            data.setdefault(name, {})[fp.ids[c]] = entry
            lines.append("%s, over %s: fiber %d, right fiber %d, left fiber %d, contractible %s"
                         % (name, fp.label(c), entry["fiber"], entry["right"], entry["left"],
                            str(ok).lower()))
            lines += ["  " + x for x in clog.lines()]
            if cfg.out:
                _write(_outdir(cfg) / ("right_fiber_%s_%s.dot" % (name, _safe(fp.ids[c]))),
                       rf.to_dot("right_fiber"))
    _emit(cfg, lines, data)
    return 1 if failed else 0


def cmd_homology(cfg: RunConfig) -> int:
    fp, m, f = load_inputs(cfg)
    m = _matching(fp, m, f)
    _require_acyclic(fp, m)
    ctx = Context(m, max_dim=cfg.max_dim, cap_paths=cfg.cap_paths,
                  cap_simplices=cfg.cap_simplices)
    chain = homology_chain(ctx)
    base = chain["F(X)"]
    lines, data, failed = [], {}, False
    for name, h in chain.items():
        same = base.agrees_with(h)
        failed |= not same
        lines.append("H(%s) = %s%s" % (name, h.describe(), "" if same else "  MISMATCH"))
        data[name] = json.loads(h.to_json())
    if cfg.out:
        _write(_outdir(cfg) / "homology.json", json.dumps(data, indent=1, sort_keys=True))
    _emit(cfg, lines, data)
    return 1 if failed else 0


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.input is None and cfg.fixture is None:
        targets = list(FIXTURES)
    else:
        targets = [cfg.fixture or cfg.input]
    results = {}
    for name in targets:
        sub = RunConfig(**{**cfg.__dict__, "fixture": name if name in FIXTURES and cfg.input is None
                           else None})
        fp, m, f = load_inputs(sub)
        m = _matching(fp, m, f)
        results[name] = run_suite(m, max_dim=cfg.max_dim, cap_paths=cfg.cap_paths,
                                  cap_simplices=cfg.cap_simplices)
    checks = [c for c, _, _ in next(iter(results.values()))]
    width = max(len(c) for c in checks)
    header = " " * width + "  " + "  ".join("%-14s" % n for n in targets)
    lines = [header.rstrip()]
    for i, check in enumerate(checks):
        row = ["%-14s" % ("PASS" if results[n][i][1] else "FAIL") for n in targets]
        lines.append((check.ljust(width) + "  " + "  ".join(row)).rstrip())
    for n in targets:
        for check, ok, detail in results[n]:
            if not ok:
                lines.append("%s / %s: %s" % (n, check, detail))
    data = {n: {c: {"ok": ok, "detail": d} for c, ok, d in res} for n, res in results.items()}
    _emit(cfg, lines, data)
    return 0 if all(ok for res in results.values() for _, ok, _ in res) else 1


def cmd_export(cfg: RunConfig) -> int:
    if not cfg.out:
        raise CheckFailed("export needs --out")
    fp, m, f = load_inputs(cfg)
    m = _matching(fp, m, f)
    _require_acyclic(fp, m)
    out = _outdir(cfg)
    ctx = Context(m, max_dim=cfg.max_dim, cap_paths=cfg.cap_paths,
                  cap_simplices=cfg.cap_simplices)
    written = {}
    written["faceposet.json"] = fp.to_json()
    written["matching.txt"] = m.to_text()
    g = ctx.f
    written["morse.txt"] = "".join("%s %d\n" % (c, v) for c, v in g.as_dict().items())
    written["flowpaths.json"] = ctx.flow(False).to_json()
    written["fp.dot"] = ctx.flow(False).poset.to_dot("FP")
    written["fpbar.dot"] = ctx.flow(True).poset.to_dot("FPbar")
    for reduced in (False, True):
        fc = ctx.category(reduced)
        name = "reduced" if reduced else "full"
        written["category_%s.json" % name] = fc.to_json()
        for c in m.critical:
            written["right_fiber_%s_%s.dot" % (name, _safe(fp.ids[c]))] = \
                right_fiber(fc, c).to_dot("right_fiber")
            written["fiber_%s_%s.dot" % (name, _safe(fp.ids[c]))] = fiber(fc, c).to_dot("fiber")
    written["homology.json"] = json.dumps({k: json.loads(h.to_json())
                                           for k, h in homology_chain(ctx).items()},
                                          indent=1, sort_keys=True)
    for name, text in written.items():
        _write(out / name, text)
    _emit(cfg, ["wrote %d files to %s" % (len(written), out)], {"files": sorted(written)})
    return 0


def _safe(cid: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", cid)


def _outdir(cfg) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str):
    if not text.endswith("\n"):
        text += "\n"
    path.write_text(text)


COMMANDS = {
    "check": cmd_check,
    "flowpaths": cmd_flowpaths,
    "category": cmd_category,
    "fibers": cmd_fibers,
    "homology": cmd_homology,
    "verify": cmd_verify,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowcat", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="complex file")
        p.add_argument("--kind", choices=["simplicial", "faceposet"], default="simplicial")
        p.add_argument("--fixture", choices=sorted(FIXTURES),
                       help="use a shipped complex together with its matching")
        src = p.add_mutually_exclusive_group()
        src.add_argument("--matching", help="matching file, lines 'd_id u_id'")
        src.add_argument("--morse", help="discrete Morse function file, lines 'cell_id integer'")
        src.add_argument("--greedy-seed", type=int, help="build a random acyclic matching")
        p.add_argument("--out", help="output directory for DOT and JSON files")
        p.add_argument("--max-dim", type=int, help="top simplex degree of the nerve")
        p.add_argument("--cap-paths", type=int, default=10**6)
        p.add_argument("--cap-simplices", type=int, default=DEFAULT_SIMPLEX_CAP)
        p.add_argument("--json", dest="as_json", action="store_true",
                       help="machine-readable report on stdout")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command, input=args.input, kind=args.kind,
                    matching=args.matching, morse=args.morse, greedy_seed=args.greedy_seed,
                    fixture=args.fixture, out=args.out, max_dim=args.max_dim,
                    cap_paths=args.cap_paths, cap_simplices=args.cap_simplices,
                    as_json=args.as_json)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = config_from_args(args)
    if cfg.input and cfg.fixture:
        parser.error("give either --input or --fixture")
    needs_source = cfg.command != "verify" or cfg.input is not None
    if cfg.input and _source_count(cfg) != 1:
        parser.error("exactly one of --matching, --morse, --greedy-seed is required with --input")
    if needs_source and not cfg.input and not cfg.fixture:
        parser.error("--input or --fixture is required")
    try:
        return COMMANDS[cfg.command](cfg)
    except CheckFailed as exc:
        print("FAIL: %s" % exc, file=sys.stderr)
        return 1
    except NotMorseError as exc:
        print("FAIL: %s" % exc, file=sys.stderr)
        return 1
    except CapacityError as exc:
        print("capacity exceeded: %s" % exc, file=sys.stderr)
        return 3
    except (ParseError, EmptyComplexError, OSError, KeyError, ValueError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    except FlowcatError as exc:
        print("FAIL: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
