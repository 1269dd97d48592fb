"""Command-line interface: analyze, isofy, oracle, fixture.

Exit codes: 0 success, 1 disagreement with the brute-force oracle, 2 parse or
input error, 3 unsupported geometry, 4 refusal by the oracle size limits.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from typing import Callable, Sequence

from .complex import homology
from .exactla import FieldMatrix
from .fixtures import running_bisheaf, schwarz_direction_bisheaf, schwarz_pair_bisheaf, torsion_bisheaf
from .inputs import EXPLICIT_FORMATS, format_cubical, format_simplicial, parse_geometry, sniff_format
from .isofy import (OracleRefusal, epify, monofy, oracle_epify, oracle_monofy, oracle_suite)
from .periodic import UnsupportedGeometry, k_fold_cover
from .report import Report, Section, format_report
from .sheafcore import (Bisheaf, CellCosheaf, CellSheaf, ParseError, SheafError, cover_bisheaf, format_objects,
                        is_episheaf, is_local_system, is_monocosheaf, parse_objects)
from .toroidal import (DirectionAnalysis, analyze_bisheaf, analyze_direction, eigenvalue_diagnostic,
                       lift_toroidal_basis)

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_REFUSED = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- fixtures

def _fixture_texts() -> dict[str, Callable[[], str]]:
    from .corpus import parallel_lines, running_example, twisted_strands

    def bis(objs):
        return lambda: format_objects(objs(), 2)

    return {
        "running": lambda: format_simplicial(running_example(4)),
        "twisted": lambda: format_simplicial(twisted_strands(3)),
        "parallel": lambda: format_simplicial(parallel_lines(3, 2)),
        "ring": lambda: format_cubical((3, 1), (True, False), [((i, 0), (0, 1)) for i in range(3)]),
        "torus": lambda: format_cubical((2, 2), (True, True), [((i, j), (0, 1)) for i in range(2) for j in range(2)]),
        "empty": lambda: "format: simplicial\nfield 2\nperiodic-dims 1\n",
        "running-bisheaf": bis(lambda: [({"name": "running", "degree": "1"}, running_bisheaf(4))]),
        "torsion": bis(lambda: [({"name": "torsion", "degree": "1"}, torsion_bisheaf(1)),
                                ({"name": "torsion", "degree": "2"}, torsion_bisheaf(2))]),
        "schwarz": bis(lambda: [({"name": "schwarz", "direction": str(i)}, schwarz_direction_bisheaf())
                                for i in (1, 2, 3)]),
        "schwarz-pair": bis(lambda: [({"name": "schwarz", "directions": "1,2"}, schwarz_pair_bisheaf())]),
    }


def read_input(path: str) -> str:
    """File contents, or a built-in example for ``fixture:<name>``."""
    if path.startswith("fixture:"):
        name = path.split(":", 1)[1]
        fx = _fixture_texts()
        if name not in fx:
            raise CliError(EXIT_PARSE, f"unknown fixture {name!r}; known: {', '.join(sorted(fx))}")
        return fx[name]()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {e.strerror}") from None


# ---------------------------------------------------------------- report helpers

def _mat(sec: Section, key: str, m: FieldMatrix) -> None:
    sec.matrix(key, m.tolist(), m.cols)


def _header(r: Report, args: argparse.Namespace, text: str | None, **extra: object) -> None:
    h = r.header
    if text is not None:
        h.add("input-sha256", hashlib.sha256(text.encode()).hexdigest())
    for k, v in extra.items():
        h.add(k.replace("_", "-"), v)
    h.add("seed", args.seed)


def _pls_fields(sec: Section, a: DirectionAnalysis, k_fold: Sequence[int]) -> None:
    b = a.bisheaf
    sec.add("sheaf-stalks", b.sheaf.stalk_dims)
    sec.add("cosheaf-stalks", b.cosheaf.stalk_dims)
    sec.add("episheaf-stalks", [s.dim for s in a.iso.epi.sub])
    sec.add("monocosheaf-stalks", a.iso.mono.dims)
    sec.add("epify-iterations", a.iso.epi.iterations)
    sec.add("monofy-iterations", a.iso.mono.iterations)
    sec.add("pls-stalks", a.pls.dims)
    sec.add("pls-rank", a.pls.rank)
    pls_co = a.pls.as_cosheaf()
    sec.add("pls-local-system", "yes" if is_local_system(pls_co)[0] else "no")
    ident = all(m == FieldMatrix.identity(m.rows, m.p) for m in a.pls.maps.values())
    sec.add("pls-identity-maps", "yes" if ident else "no")
    sec.add("pls-trivial", "yes" if a.pls.rank == 0 else "no")
    rep = a.report
    if rep is None:
        sec.add("monodromy", "none (base is not a circle)")
        return
    sec.add("base-vertex", rep.base_vertex)
    _mat(sec, "monodromy", rep.matrix)
    sec.add("eigenspace-dim", rep.one_eigenspace.dim)
    _mat(sec, "eigenspace", rep.one_eigenspace.basis)
    sec.add("power-ranks", [f"{k}:{rep.powers[k]}" for k in k_fold])
    sec.add("order", eigenvalue_diagnostic(rep.matrix, 64))


# ---------------------------------------------------------------- commands

def _analyze_geometry(args, text: str, r: Report) -> int:
    kind, p, g = parse_geometry(text, args.field)
    q = args.degree
    if q < 1:
        raise CliError(EXIT_PARSE, "--degree must be at least 1 (toroidal cycles have positive degree)")
    _header(r, args, text, format=kind, field=p, degree=q, periodic_dims=g.d,
            cells=[g.complex.dims.count(i) for i in range(g.complex.dimension + 1)] if len(g) else [0])
    hq = homology(g.complex, q)
    r.header.add("homology-rank", hq.rank)
    status = EXIT_OK
    dirs = args.direction or list(range(1, g.d + 1))
    for i in dirs:
        sec = r.section("direction", index=i)
        if not 1 <= i <= g.d:
            raise CliError(EXIT_PARSE, f"direction {i} outside 1..{g.d}")
        try:
            a = analyze_direction(g, i, q, p, powers=args.k_fold)
        except UnsupportedGeometry as e:
            sec.add("status", "unsupported")
            sec.add("reason", str(e))
            status = EXIT_UNSUPPORTED
            continue
        sec.add("status", "ok")
        fm = a.built.model
        sec.add("base-angles", [str(t) for t in fm.base.vertex_angles])
        sec.add("artificial-angles", [str(t) for t in fm.base.artificial] or ["none"])
        sec.add("subdivision-rounds", fm.rounds)
        sec.add("cuts", [str(fm.cuts[j]) for j in range(fm.base.m)])
        _pls_fields(sec, a, args.k_fold)
        sec.add("cover-ranks", [f"{k}:{analyze_direction(k_fold_cover(g, i, k), i, q, p).report.toroidal_rank}"
                                for k in args.k_fold])
        tb = lift_toroidal_basis(g, i, q, p, analysis=a)
        sec.add("homology-image-dim", tb.homology_image.dim)
        sec.add("lifted-cycles", len(tb.cycles))
        for z, c in zip(tb.cycles, tb.pls_coords):
            sec.add("cycle", [f"{x}:{v}" for x, v in sorted(z.coeffs.items())] or ["0"])
            sec.add("cycle-pls", c)
    return status


def _explicit_objects(text: str, field: int | None):
    kind, p, base, objs = parse_objects(text)
    if field is not None and field != p:
        raise CliError(EXIT_PARSE, f"--field {field} disagrees with the input's field {p}")
    return kind, p, base, objs


def _oracle_check(sec: Section, sheaf: CellSheaf | None, cosheaf: CellCosheaf | None) -> bool:
    ok = True
    if sheaf is not None:
        same = oracle_epify(sheaf).sub == epify(sheaf).sub
        sec.add("oracle-epify", "agree" if same else "MISMATCH")
        ok = ok and same
    if cosheaf is not None:
        same = oracle_monofy(cosheaf).kern == monofy(cosheaf).kern
        sec.add("oracle-monofy", "agree" if same else "MISMATCH")
        ok = ok and same
    return ok


def _analyze_explicit(args, text: str, r: Report) -> int:
    kind, p, base, objs = _explicit_objects(text, args.field)
    if kind != "bisheaf":
        raise CliError(EXIT_PARSE, "analyze needs geometric or bisheaf input; use 'isofy' for a lone (co)sheaf")
    _header(r, args, text, format=kind, field=p, base_cells=len(base))
    status = EXIT_OK
    for n, (tags, b) in enumerate(objs):
        sec = r.section("block", {"index": n, **tags})
        a = analyze_bisheaf(b, 1, int(tags.get("degree", 1)), 0, args.k_fold)
        _pls_fields(sec, a, args.k_fold)
        if a.report is not None:
            sec.add("cover-ranks", [f"{k}:{analyze_bisheaf(cover_bisheaf(b, k)).report.toroidal_rank}"
                                    for k in args.k_fold])
        if args.oracle and not _oracle_check(sec, b.sheaf, b.cosheaf):
            status = EXIT_MISMATCH
    return status


def cmd_analyze(args) -> tuple[Report, int]:
    text = read_input(args.input)
    r = Report("analyze")
    if sniff_format(text) in EXPLICIT_FORMATS:
        return r, _analyze_explicit(args, text, r)
    return r, _analyze_geometry(args, text, r)


def cmd_isofy(args) -> tuple[Report, int]:
    text = read_input(args.input)
    kind, p, base, objs = _explicit_objects(text, args.field)
    r = Report("isofy")
    _header(r, args, text, format=kind, field=p, base_cells=len(base))
    status = EXIT_OK
    out_objs = []
    for n, (tags, o) in enumerate(objs):
        sec = r.section("block", {"index": n, **tags})
        sheaf = o.sheaf if isinstance(o, Bisheaf) else o if isinstance(o, CellSheaf) else None
        cos = o.cosheaf if isinstance(o, Bisheaf) else o if isinstance(o, CellCosheaf) else None
        new_s = new_c = None
        if sheaf is not None:
            e = epify(sheaf)
            new_s = e.as_sheaf()
            ok, w = is_episheaf(sheaf)
            sec.add("input-episheaf", "yes" if ok else f"no witness={w[0]},{w[1]}")
            sec.add("epify-iterations", e.iterations)
            sec.add("episheaf-stalks", new_s.stalk_dims)
            ok, w = is_episheaf(new_s)
            sec.add("output-episheaf", "yes" if ok else f"no witness={w[0]},{w[1]}")
            sec.add("unchanged", "yes" if all(s.dim == d for s, d in zip(e.sub, sheaf.stalk_dims)) else "no")
            for x in range(len(base)):
                _mat(sec, f"inclusion.{x}", e.inclusion(x))
        if cos is not None:
            m = monofy(cos)
            new_c = m.as_cosheaf()
            ok, w = is_monocosheaf(cos)
            sec.add("input-monocosheaf", "yes" if ok else f"no witness={w[0]},{w[1]}")
            sec.add("monofy-iterations", m.iterations)
            sec.add("monocosheaf-stalks", new_c.stalk_dims)
            ok, w = is_monocosheaf(new_c)
            sec.add("output-monocosheaf", "yes" if ok else f"no witness={w[0]},{w[1]}")
            for x in range(len(base)):
                _mat(sec, f"projection.{x}", m.proj[x])
        if args.oracle and not _oracle_check(sec, sheaf, cos):
            status = EXIT_MISMATCH
        if new_s is not None and new_c is not None:
            a = analyze_bisheaf(o)
            out_objs.append((tags, a.iso.as_bisheaf()))
        else:
            out_objs.append((tags, new_s if new_s is not None else new_c))
    if args.objects:
        _write(args.objects, format_objects(out_objs, p))
    return r, status


def cmd_oracle(args, epify_impl: Callable = epify, monofy_impl: Callable = monofy) -> tuple[Report, int]:
    p = args.field or 2
    s = oracle_suite(args.count, args.seed, p, args.max_vertices, args.max_dim, epify_impl, monofy_impl)
    r = Report("oracle")
    _header(r, args, None, field=p, instances=s.instances, max_vertices=args.max_vertices, max_dim=args.max_dim)
    sec = r.section("summary")
    sec.add("sheaf-agree", f"{s.instances - len(s.sheaf_mismatches)}/{s.instances}")
    sec.add("cosheaf-agree", f"{s.instances - len(s.cosheaf_mismatches)}/{s.instances}")
    sec.add("sheaf-mismatches", s.sheaf_mismatches or ["none"])
    sec.add("cosheaf-mismatches", s.cosheaf_mismatches or ["none"])
    sec.add("result", "pass" if s.ok else "fail")
    return r, EXIT_OK if s.ok else EXIT_MISMATCH


# ---------------------------------------------------------------- entry point

def _k_list(s: str) -> list[int]:
    try:
        ks = [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {s!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("k-fold values must be positive")
    return sorted(set(ks))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toroidal-pls", description="Toroidal cycles of periodic complexes "
                                 "via persistent local systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("input", help="input file, or fixture:<name> for a built-in example")
        sp.add_argument("--field", type=int, default=None, help="prime field characteristic")
        sp.add_argument("--seed", type=int, default=0, help="seed recorded in (and driving) the report")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")

    a = sub.add_parser("analyze", help="PLS, monodromy and toroidal cycles per direction")
    common(a)
    a.add_argument("--degree", type=int, default=1, help="cycle degree q (sheaf degree q, cosheaf degree q-1)")
    a.add_argument("--direction", type=int, action="append", help="direction to analyze (repeatable)")
    a.add_argument("--k-fold", type=_k_list, default=[1], help="comma list of cover degrees, e.g. 1,2")
    a.add_argument("--oracle", action="store_true", help="cross-check epify/monofy against brute force")

    i = sub.add_parser("isofy", help="epify/monofy explicit (co)sheaf input")
    common(i)
    i.add_argument("--oracle", action="store_true", help="cross-check against brute force")
    i.add_argument("--objects", default=None, help="also write the isofied objects in the explicit format")

    o = sub.add_parser("oracle", help="random agreement suite against the brute-force oracles")
    common(o, with_input=False)
    o.add_argument("--count", type=int, default=200)
    o.add_argument("--max-vertices", type=int, default=4)
    o.add_argument("--max-dim", type=int, default=3)

    f = sub.add_parser("fixture", help="print a built-in example input")
    f.add_argument("name", choices=sorted(_fixture_texts()))
    f.add_argument("--out", default=None)
    return ap


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: Sequence[str] | None = None, epify_impl: Callable = epify, monofy_impl: Callable = monofy) -> int:
    """Run the CLI.  The ``*_impl`` hooks let a harness swap in a broken algorithm."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fixture":
            _write(args.out, _fixture_texts()[args.name]())
            return EXIT_OK
        if args.command == "analyze":
            r, code = cmd_analyze(args)
        elif args.command == "isofy":
            r, code = cmd_isofy(args)
        else:
            r, code = cmd_oracle(args, epify_impl, monofy_impl)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ParseError as e:
        print(f"parse error: {getattr(args, 'input', '')}:{e}", file=sys.stderr)
        return EXIT_PARSE
    except SheafError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedGeometry as e:
        print(f"unsupported geometry: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except OracleRefusal as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    _write(args.out, format_report(r))
    return code


if __name__ == "__main__":
    sys.exit(main())
