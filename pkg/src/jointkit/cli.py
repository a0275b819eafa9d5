"""Command-line experiment harness.

Subcommands: generate, analyze, verify, vanish, census, sweep.  Reports are
UTF-8 JSON (CSV for sweeps) carrying a provenance header.  Exit status: 0 on
success, 2 for usage or input errors, 3 when an exact assertion fails, 4 when
a size cap is exceeded.  Caps are overridden through ``JOINTKIT_CAPS``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .affine import GeometryError, subspace_from_json
from .caps import CapExceeded
from .field import FieldError, field_from_descriptor
from .generators import (
    axis_grid,
    axis_grid_descriptor,
    bush,
    bush_descriptor,
    check_multijoint_grid,
    ff_descriptor,
    finite_field_counterexample,
    loomis_whitney_grid,
    multijoint_descriptor,
    multijoint_grid,
    random_lines,
    ConfigDescriptor,
)
from .incidence import (
    LineFamily,
    classify_levels,
    dyadic_levels,
    find_joints,
    find_multijoints,
    good_set_ratio,
    joints_report,
    kakeya_sum,
    multijoint_ratio,
)
from .mpoly import PolyError, poly_from_text
from .vanishing import VanishingError, VanishingSpec, min_degree_annihilator, verify_vanishing
from .zeroset import (
    FactoredVariety,
    PlanePartition,
    factor_intersection_line,
    line_census,
    nearly_planar_verify,
    per_plane_kakeya_report,
    planar_structure_search,
    planar_structure_verify,
)

EXIT_OK, EXIT_USAGE, EXIT_ASSERT, EXIT_CAP = 0, 2, 3, 4

GENERATOR_KINDS = ("axis-grid", "loomis-whitney", "bush", "ff-counterexample", "random-lines", "multijoint-grid")


class UsageError(Exception):
    pass


def _hash_config(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def provenance(cfg: dict) -> dict:
    return {
        "tool": "jointkit",
        "version": __version__,
        "config_hash": _hash_config(cfg),
        "timestamp": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
    }


def _effective(args: argparse.Namespace) -> dict:
    skip = {"func", "config", "out", "input"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write(text: str, out: str | None):
    if out and out != "-":
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, args) -> None:
    doc = {"provenance": provenance(_effective(args))}
    doc.update(obj)
    _write(json.dumps(doc, indent=2) + "\n", args.out)


def _read_json(path: str | None) -> dict:
    try:
        if not path or path == "-":
            return json.loads(sys.stdin.read())
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read JSON input {path or '-'}: {e}") from None


def _frac(s: str) -> Fraction:
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


# --------------------------------------------------------------------------
# generate


def build(kind: str, params: dict) -> dict:
    """Build a configuration document (descriptor plus geometry)."""
    F = field_from_descriptor(params.get("field") or "Q")
    if kind == "axis-grid":
        n, N = int(params.get("n") or 3), int(params.get("N") or 2)
        fam = axis_grid(n, N, F)
        desc = axis_grid_descriptor(n, N)
        return {"config": desc.to_json(), "family": fam.to_json()}
    if kind == "loomis-whitney":
        N = int(params.get("N") or 2)
        fam, hint = loomis_whitney_grid(N, F)
        desc = ConfigDescriptor("loomis-whitney", {"N": N}, {"lines": 3 * N * N, "joints": N**3, "m": 3})
        return {
            "config": desc.to_json(),
            "family": fam.to_json(),
            "partition": [
                {"plane": P.to_json(), "joints": [[F.format(v) for v in x] for x in js], "lines": list(ls)}
                for P, js, ls in zip(hint.planes, hint.joints, hint.lines)
            ],
        }
    if kind == "bush":
        M = int(params.get("M") or 5)
        cop = not params.get("noncoplanar", False)
        tr = bool(params.get("transverse", False))
        fam = bush(M, coplanar=cop, add_transverse=tr, field=F)
        return {"config": bush_descriptor(M, cop, tr).to_json(), "family": fam.to_json()}
    if kind == "ff-counterexample":
        p = int(params.get("p") or 3)
        fam = finite_field_counterexample(p)
        return {"config": ff_descriptor(p).to_json(), "family": fam.to_json()}
    if kind == "random-lines":
        n, count, seed = int(params.get("n") or 3), int(params.get("count") or 10), int(params.get("seed") or 0)
        fam = random_lines(n, count, F, seed)
        desc = ConfigDescriptor("random-lines", {"n": n, "count": count, "field": str(F), "seed": seed}, {"lines": count})
        return {"config": desc.to_json(), "family": fam.to_json()}
    if kind == "multijoint-grid":
        n, k, N = int(params.get("n") or 3), int(params.get("k") or 2), int(params.get("N") or 2)
        planes, fams = multijoint_grid(n, k, N, F)
        return {
            "config": multijoint_descriptor(n, k, N).to_json(),
            "field": str(F),
            "planes": [P.to_json() for P in planes],
            "families": [f.to_json() for f in fams],
        }
    raise UsageError(f"unknown generator kind {kind!r}")


def cmd_generate(args) -> int:
    params = {k: getattr(args, k) for k in ("n", "N", "k", "p", "M", "count", "seed", "field", "noncoplanar", "transverse")}
    _emit_json(build(args.kind, params), args)
    return EXIT_OK


# --------------------------------------------------------------------------
# analyze


def _check_expected(doc: dict, measured: dict) -> list:
    exp = doc.get("config", {}).get("expected", {})
    fails = []
    for key, val in measured.items():
        if key in exp and exp[key] != val:
            fails.append({"quantity": key, "expected": exp[key], "measured": val})
    return fails


def _levels_json(J, L, args) -> dict:
    verdicts = classify_levels(dyadic_levels(J), L, args.eps, args.C, args.c)
    return {str(k): {"count": v.count, "good": v.good, "large": v.large} for k, v in verdicts.items()}


def cmd_analyze(args) -> int:
    doc = _read_json(args.input)
    if args.what in ("joints", "levels"):
        if "family" not in doc:
            raise UsageError("input has no line family")
        fam = LineFamily.from_json(doc["family"])
        J = find_joints(fam)
        rep = joints_report(fam, J, args.kakeya)
        rep["level_verdicts"] = _levels_json(J, len(fam), args)
        measured = {"lines": len(fam), "joints": len(J)}
        ms = {j.m for j in J}
        if len(ms) == 1:
            measured["m"] = ms.pop()
        fails = _check_expected(doc, measured)
        if args.what == "levels":
            rep = {"L": rep["L"], "levels": rep["levels"], "level_verdicts": rep["level_verdicts"]}
        rep["assertions"] = {"passed": not fails, "failures": fails}
        _emit_json({"report": rep}, args)
        return EXIT_ASSERT if fails else EXIT_OK
    if args.what == "multijoints":
        if "planes" not in doc:
            raise UsageError("input has no plane family")
        F = field_from_descriptor(doc.get("field"))
        planes = [subspace_from_json(P, F) for P in doc["planes"]]
        fams = [LineFamily.from_json(f) for f in doc["families"]]
        mj = find_multijoints(planes, fams)
        rep = {
            "planes": len(planes),
            "families": [len(f) for f in fams],
            "multijoints": [{"point": [F.format(v) for v in r.point], "N": r.N} for r in mj],
            "ratio": multijoint_ratio(len(mj), planes, fams),
        }
        fails = _check_expected(doc, {"planes": len(planes), "multijoints": len(mj)})
        rep["assertions"] = {"passed": not fails, "failures": fails}
        _emit_json({"report": rep}, args)
        return EXIT_ASSERT if fails else EXIT_OK
    raise UsageError(f"unknown analysis {args.what!r}")


# --------------------------------------------------------------------------
# verify


def _partition_from_doc(doc, F):
    if "partition" not in doc:
        raise UsageError("input has no plane partition")
    planes, assign = [], {}
    for i, part in enumerate(doc["partition"]):
        planes.append(subspace_from_json(part["plane"], F))
        for x in part["joints"]:
            assign[tuple(F.parse(str(v)) for v in x)] = i
    return PlanePartition(tuple(planes), assign)


def cmd_verify(args) -> int:
    doc = _read_json(args.input)
    fam = LineFamily.from_json(doc["family"])
    F = fam.field
    J = find_joints(fam, with_multiplicity=False)
    if args.search:
        res = planar_structure_search(J, fam, args.c1)
        out = {"search": {"success": res.success, "best_c1": str(res.best_c1), "blocking": res.blocking}}
        if res.success:
            out["certificate"] = res.certificate.to_json()
        _emit_json(out, args)
        return EXIT_OK if res.success else EXIT_ASSERT
    part = _partition_from_doc(doc, F)
    if args.c2 is not None:
        subsets = {k: [j.point for j in v] for k, v in dyadic_levels(J).items()}
        cert = nearly_planar_verify(J, fam, subsets, part, args.c1, args.c2)
    else:
        cert = planar_structure_verify(J, fam, part, args.c1)
    out = {"certificate": cert.to_json()}
    if cert.accepted:
        out["per_plane_kakeya"] = per_plane_kakeya_report(cert, fam)
    _emit_json(out, args)
    return EXIT_OK if cert.accepted else EXIT_ASSERT


# --------------------------------------------------------------------------
# vanish


def cmd_vanish(args) -> int:
    doc = _read_json(args.input)
    spec = VanishingSpec.from_json(doc.get("spec", doc))
    D, p = min_degree_annihilator(spec, args.dmax)
    rep = verify_vanishing(p, spec)
    _emit_json({"D": D, "annihilator": p.to_text(), "violations": rep.violations}, args)
    return EXIT_OK if rep.ok else EXIT_ASSERT


# --------------------------------------------------------------------------
# census


def cmd_census(args) -> int:
    doc = _read_json(args.input)
    F = field_from_descriptor(doc.get("field"))
    n = int(doc.get("n", 3))
    factors = [(poly_from_text(f["poly"], F, n), int(f.get("mult", 1))) for f in doc["factors"]]
    V = FactoredVariety(factors)
    if "lines" in doc:
        cands = [subspace_from_json(l, F) for l in doc["lines"]]
    else:
        lin = [g for g, _ in V.factors if g.degree == 1]
        cands = []
        for i in range(len(lin)):
            for j in range(i + 1, len(lin)):
                l = factor_intersection_line(lin[i], lin[j])
                if l is not None:
                    cands.append(l)
    rep = line_census(V, cands)
    _emit_json(
        {
            "d": rep.d,
            "square_free": V.p_sf.to_text(),
            "candidates": len(rep.classes),
            "critical": rep.critical,
            "flat": rep.flat,
            "flat_not_in_plane": rep.flat_not_in_plane,
            "bounds": {"critical": rep.critical_bound, "flat_not_in_plane": rep.flat_bound},
            "ok": rep.ok,
        },
        args,
    )
    return EXIT_OK if rep.ok else EXIT_ASSERT


# --------------------------------------------------------------------------
# sweep

SWEEP_COLUMNS = [
    "kind", "param", "value", "lines", "joints", "incidences",
    "kakeya_3_2", "good_2_minus_eps", "multijoint_ratio", "levels", "status",
]


def parse_range(text: str) -> list[int]:
    """``"2..6"`` (inclusive), ``"3,5,7"``, or a mix; empty string gives []."""
    out: list[int] = []
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _level_cell(J, L, eps, C, c) -> str:
    v = classify_levels(dyadic_levels(J), L, eps, C, c)
    return ";".join(f"{k}:{x.count}:{'G' if x.good else 'B'}{':L' if x.large else ''}" for k, x in v.items())


def sweep_row(kind: str, param: str, value: int, fixed: dict, eps, C, c) -> dict:
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(kind=kind, param=param, value=value)
    params = dict(fixed)
    params[param] = value
    try:
        if kind == "multijoint-grid":
            F = field_from_descriptor(params.get("field") or "Q")
            planes, fams, mj, _ = check_multijoint_grid(int(params.get("n", 3)), int(params.get("k", 2)), int(params.get("N", 2)), F)
            row.update(lines=sum(len(f) for f in fams), joints=len(mj), multijoint_ratio=f"{multijoint_ratio(len(mj), planes, fams):.12g}", status="ok")
            return row
        doc = build(kind, params)
        fam = LineFamily.from_json(doc["family"])
        J = find_joints(fam, with_multiplicity=False)
        L = len(fam)
        ks = kakeya_sum(J, Fraction(3, 2), L) if J else None
        row.update(
            lines=L,
            joints=len(J),
            incidences=sum(j.m for j in J),
            kakeya_3_2=f"{ks.ratio:.12g}" if ks else "0",
            good_2_minus_eps=f"{good_set_ratio(J, L, eps, C, c):.12g}",
            levels=_level_cell(J, L, eps, C, c),
            status="ok",
        )
    except CapExceeded as e:
        row["status"] = f"skipped: {e}"
    except (FieldError, GeometryError, ValueError) as e:
        row["status"] = f"skipped: {e}"
    return row


def run_sweep(kind: str, param: str, values, fixed: dict, eps=Fraction(1, 4), C=Fraction(10), c=Fraction(1)) -> list[dict]:
    return [sweep_row(kind, param, v, fixed, eps, C, c) for v in sorted(values)]


def sweep_csv(rows, prov: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: {prov['tool']} {prov['version']}\n")
    buf.write(f"# config_hash: {prov['config_hash']}\n")
    buf.write(f"# timestamp: {prov['timestamp']}\n")
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


DEFAULT_PARAM = {
    "axis-grid": "N",
    "loomis-whitney": "N",
    "bush": "M",
    "ff-counterexample": "p",
    "random-lines": "count",
    "multijoint-grid": "N",
}


def cmd_sweep(args) -> int:
    param = args.param or DEFAULT_PARAM[args.kind]
    values = parse_range(args.range)
    fixed = {}
    for item in args.fixed or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--fixed expects key=value, got {item!r}")
        fixed[key.strip()] = val.strip()
    if args.seed is not None:
        fixed.setdefault("seed", args.seed)
    rows = run_sweep(args.kind, param, values, fixed, args.eps, args.C, args.c)
    _write(sweep_csv(rows, provenance(_effective(args))), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file of option defaults (command-line flags win)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="output path (default: stdout)")


def _add_level_constants(p):
    p.add_argument("--eps", type=_frac, default=None, help="epsilon in (0, 1/2), default 1/4")
    p.add_argument("--C", type=_frac, default=None, help="goodness constant, default 10")
    p.add_argument("--c", type=_frac, default=None, help="small/large threshold constant, default 1")


LEVEL_DEFAULTS = {"eps": Fraction(1, 4), "C": Fraction(10), "c": Fraction(1)}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jointkit", description="Exact joints, multijoints and polynomial-method experiments.")
    ap.add_argument("--version", action="version", version=f"jointkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a configuration")
    g.add_argument("kind", choices=GENERATOR_KINDS)
    g.add_argument("--n", type=int)
    g.add_argument("--N", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--M", type=int)
    g.add_argument("--count", type=int)
    g.add_argument("--field", help='"Q" or "F_p"')
    g.add_argument("--noncoplanar", action="store_true", default=None)
    g.add_argument("--transverse", action="store_true", default=None)
    _add_common(g)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="analyze a generated configuration")
    a.add_argument("what", choices=("joints", "levels", "multijoints"))
    a.add_argument("--input", default="-")
    a.add_argument("--kakeya", default=None, help="Kakeya exponent s, default 3/2")
    _add_level_constants(a)
    _add_common(a)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="verify a planar structure certificate")
    v.add_argument("what", choices=("structure",))
    v.add_argument("--input", default="-")
    v.add_argument("--c1", type=_frac, default=None, help="default 1/2")
    v.add_argument("--c2", type=_frac, default=None, help="also check nearly planar structure with this c2")
    v.add_argument("--search", action="store_true", default=None, help="search for a partition instead of reading one")
    _add_common(v)
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("vanish", help="lowest-degree polynomial meeting a vanishing spec")
    n.add_argument("--input", default="-")
    n.add_argument("--dmax", type=int, default=None, help="degree budget, default 8")
    _add_common(n)
    n.set_defaults(func=cmd_vanish)

    c = sub.add_parser("census", help="critical and flat line census of a factored variety")
    c.add_argument("--input", default="-")
    _add_common(c)
    c.set_defaults(func=cmd_census)

    s = sub.add_parser("sweep", help="CSV ratio table over a parameter range")
    s.add_argument("kind", choices=GENERATOR_KINDS)
    s.add_argument("--param", default=None)
    s.add_argument("--range", default=None, help='e.g. "2..6" or "3,5,7,11"')
    s.add_argument("--fixed", action="append", default=None, help="key=value held fixed (repeatable)")
    _add_level_constants(s)
    _add_common(s)
    s.set_defaults(func=cmd_sweep)
    return ap


COMMAND_DEFAULTS = {
    "analyze": {"kakeya": "3/2", **LEVEL_DEFAULTS},
    "sweep": {"range": "", **LEVEL_DEFAULTS},
    "verify": {"c1": Fraction(1, 2), "search": False},
    "vanish": {"dmax": 8},
}


def _apply_config(args) -> None:
    """Fill options left unset on the command line from --config, then defaults."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    known = vars(args)
    for key, val in cfg.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if known[key] is None:
            if key in ("eps", "C", "c", "c1", "c2"):
                val = _frac(val)
            setattr(args, key, val)
    for key, val in COMMAND_DEFAULTS.get(args.command, {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    for key in ("eps", "C", "c"):
        val = getattr(args, key, None)
        if val is None:
            continue
        if key == "eps" and not 0 < val < Fraction(1, 2):
            raise UsageError("--eps must lie in (0, 1/2)")
        if val <= 0:
            raise UsageError(f"--{key} must be positive")


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _apply_config(args)
        return args.func(args)
    except UsageError as e:
        print(f"jointkit: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as e:
        print(f"jointkit: {e}", file=sys.stderr)
        return EXIT_CAP
    except (FieldError, GeometryError, PolyError, VanishingError, KeyError, ValueError) as e:
        print(f"jointkit: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
