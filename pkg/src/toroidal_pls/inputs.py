"""Text formats for geometric input (cubical and simplicial periodic complexes)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .periodic import PeriodicComplex, UnsupportedGeometry, periodic_cubical, periodic_simplicial
from .sheafcore import ParseError

GEOMETRIC_FORMATS = ("cubical", "simplicial")
EXPLICIT_FORMATS = ("bisheaf", "sheaf", "cosheaf")


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for i, ln in enumerate(text.splitlines()):
        ln = ln.split("#", 1)[0].strip()
        if ln:
            out.append((i + 1, ln.split()))
    return out


def sniff_format(text: str) -> str:
    """Format named by the 'format:' header line."""
    for i, ln in enumerate(text.splitlines()):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if not ln.startswith("format:"):
            raise ParseError(i + 1, "first line must be 'format: <name>'")
        kind = ln.split(":", 1)[1].strip()
        if kind not in GEOMETRIC_FORMATS + EXPLICIT_FORMATS:
            raise ParseError(i + 1, f"unknown format {kind!r}")
        return kind
    raise ParseError(1, "empty input")


def _int(ln: int, tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(ln, f"expected an integer, got {tok!r}") from None


def _frac(ln: int, tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(ln, f"expected a rational number, got {tok!r}") from None


def _field(ln: int, toks: list[str]) -> int:
    if len(toks) != 2:
        raise ParseError(ln, "expected 'field <p>'")
    p = _int(ln, toks[1])
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ParseError(ln, f"field characteristic {p} is not prime")
    return p


def parse_geometry(text: str, p: int | None = None) -> tuple[str, int, PeriodicComplex]:
    """Parse cubical or simplicial input; ``p`` overrides the file's field."""
    kind = sniff_format(text)
    if kind not in GEOMETRIC_FORMATS:
        raise ParseError(1, f"format {kind!r} is not geometric")
    lines = _lines(text)[1:]
    file_p = 2
    if kind == "cubical":
        extent = periodic = None
        cubes = []
        for ln, t in lines:
            if t[0] == "field":
                file_p = _field(ln, t)
            elif t[0] == "extent":
                extent = [_int(ln, x) for x in t[1:]]
            elif t[0] == "periodic":
                periodic = [bool(_int(ln, x)) for x in t[1:]]
            elif t[0] == "cube":
                if ":" not in t:
                    raise ParseError(ln, "expected 'cube <corner...> : <axes...>'")
                k = t.index(":")
                cubes.append(([_int(ln, x) for x in t[1:k]], [_int(ln, x) for x in t[k + 1:]]))
            else:
                raise ParseError(ln, f"unexpected keyword {t[0]!r}")
        if extent is None or periodic is None:
            raise ParseError(lines[-1][0] if lines else 1, "cubical input needs 'extent' and 'periodic' lines")
        if len(extent) != len(periodic):
            raise ParseError(lines[-1][0], "extent and periodic lists differ in length")
        try:
            g = periodic_cubical(extent, periodic, cubes, p or file_p)
        except UnsupportedGeometry:
            raise
        except ValueError as e:
            raise ParseError(lines[-1][0], str(e)) from None
        return kind, p or file_p, g
    d = None
    coords: list[tuple[Fraction, ...]] = []
    sims = []
    for ln, t in lines:
        if t[0] == "field":
            file_p = _field(ln, t)
        elif t[0] == "periodic-dims":
            if len(t) != 2:
                raise ParseError(ln, "expected 'periodic-dims <d>'")
            d = _int(ln, t[1])
        elif t[0] == "vertex":
            if len(t) < 3:
                raise ParseError(ln, "expected 'vertex <id> <coord> ...'")
            if _int(ln, t[1]) != len(coords):
                raise ParseError(ln, f"vertex ids must be dense and in order; expected {len(coords)}")
            c = tuple(_frac(ln, x) for x in t[2:])
            if coords and len(c) != len(coords[0]):
                raise ParseError(ln, "vertex coordinates differ in length")
            coords.append(c)
        elif t[0] == "simplex":
            if d is None:
                raise ParseError(ln, "'periodic-dims' must precede the simplices")
            items = []
            for tok in t[1:]:
                v, _, sh = tok.partition("@")
                shift = tuple(_int(ln, x) for x in sh.split(",")) if sh else (0,) * d
                if len(shift) != d:
                    raise ParseError(ln, f"shift in {tok!r} needs {d} components")
                vi = _int(ln, v)
                if not 0 <= vi < len(coords):
                    raise ParseError(ln, f"unknown vertex {vi}")
                items.append((vi, shift))
            if not items:
                raise ParseError(ln, "empty simplex")
            sims.append(items)
        else:
            raise ParseError(ln, f"unexpected keyword {t[0]!r}")
    if d is None:
        raise ParseError(lines[-1][0] if lines else 1, "simplicial input needs 'periodic-dims'")
    for c in coords:
        if len(c) < d or any(not 0 <= c[j] < 1 for j in range(d)):
            raise ParseError(1, f"vertex coordinate {tuple(str(x) for x in c)} is not in [0,1) along periodic axes")
    try:
        g = periodic_simplicial(coords, sims, d, p or file_p)
        g.check()
    except UnsupportedGeometry:
        raise
    except ValueError as e:
        raise ParseError(lines[-1][0] if lines else 1, str(e)) from None
    return kind, p or file_p, g


def format_simplicial(g: PeriodicComplex) -> str:
    """Vertex table and maximal simplices of a simplicial periodic complex."""
    c = g.complex
    lines = ["format: simplicial", f"field {g.p}", f"periodic-dims {g.d}"]
    for v in sorted(g.vertex_ids()):
        lines.append(f"vertex {v} " + " ".join(str(x) for x in g.coords[v]))
    for x in range(len(c)):
        if c.dims[x] == 0 or c.cofaces(x):
            continue
        toks = [f"{v}@" + ",".join(str(a) for a in s) for v, s in g.key(x)]
        lines.append("simplex " + " ".join(toks))
    return "\n".join(lines) + "\n"


def format_cubical(extent: Sequence[int], periodic: Sequence[bool], cubes, p: int = 2) -> str:
    lines = ["format: cubical", f"field {p}", "extent " + " ".join(str(e) for e in extent),
             "periodic " + " ".join(str(int(b)) for b in periodic)]
    for corner, axes in cubes:
        lines.append("cube " + " ".join(str(x) for x in corner) + " : " + " ".join(str(a) for a in axes))
    return "\n".join(lines) + "\n"
