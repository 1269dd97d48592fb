"""Key-value report format with inline matrix blocks.

    report <command>
    <key> <value...>
    section <name> [k=v ...]
    matrix <key> <rows> <cols>
    <row>
    ...
    end

Values are kept as strings; matrices as lists of int rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .sheafcore import ParseError

Entry = tuple[str, object]


@dataclass
class Section:
    name: str
    tags: dict[str, str] = field(default_factory=dict)
    entries: list[Entry] = field(default_factory=list)

    def add(self, key: str, value: object) -> None:
        if isinstance(value, (list, tuple)) and not isinstance(value, str):
            value = " ".join(str(v) for v in value)
        self.entries.append((key, value if isinstance(value, Matrix) else str(value)))

    def matrix(self, key: str, rows: list[list[int]], ncols: int) -> None:
        self.entries.append((key, Matrix(len(rows), ncols, [list(r) for r in rows])))

    def get(self, key: str) -> object:
        for k, v in self.entries:
            if k == key:
                return v
        raise KeyError(key)

    def get_all(self, key: str) -> list[object]:
        return [v for k, v in self.entries if k == key]


@dataclass
class Matrix:
    rows: int
    cols: int
    entries: list[list[int]]


@dataclass
class Report:
    command: str
    header: Section = field(default_factory=lambda: Section("header"))
    sections: list[Section] = field(default_factory=list)

    def section(self, kind: str, tags: dict[str, object] | None = None, **more: object) -> Section:
        s = Section(kind, {k: str(v) for k, v in {**(tags or {}), **more}.items()})
        self.sections.append(s)
        return s

    def find(self, name: str, **tags: object) -> list[Section]:
        want = {k: str(v) for k, v in tags.items()}
        return [s for s in self.sections if s.name == name and all(s.tags.get(k) == v for k, v in want.items())]


def _entry_lines(entries: list[Entry]) -> list[str]:
    out = []
    for k, v in entries:
        if isinstance(v, Matrix):
            out.append(f"matrix {k} {v.rows} {v.cols}")
            out += [" ".join(str(x) for x in r) for r in v.entries]
        else:
            out.append(f"{k} {v}".rstrip())
    return out


def format_report(r: Report) -> str:
    lines = [f"report {r.command}"]
    lines += _entry_lines(r.header.entries)
    for s in r.sections:
        lines.append("section " + " ".join([s.name] + [f"{k}={v}" for k, v in s.tags.items()]))
        lines += _entry_lines(s.entries)
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> Report:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("report "):
        raise ParseError(1, "missing 'report <command>' line")
    r = Report(lines[0].split(" ", 1)[1])
    cur = r.header
    i = 1
    while i < len(lines):
        ln = lines[i]
        if ln == "end":
            if i != len(lines) - 1:
                raise ParseError(i + 1, "content after 'end'")
            return r
        key, _, rest = ln.partition(" ")
        if key == "section":
            toks = rest.split(" ")
            tags = dict(t.split("=", 1) for t in toks[1:])
            cur = Section(toks[0], tags)
            r.sections.append(cur)
        elif key == "matrix":
            name, nr, nc = rest.split(" ")
            nr, nc = int(nr), int(nc)
            rows = []
            for k in range(nr):
                i += 1
                row = [int(x) for x in lines[i].split()] if nc else []
                if len(row) != nc:
                    raise ParseError(i + 1, "matrix row of wrong length")
                rows.append(row)
            cur.entries.append((name, Matrix(nr, nc, rows)))
        else:
            cur.entries.append((key, rest))
        i += 1
    raise ParseError(len(lines), "missing 'end'")
