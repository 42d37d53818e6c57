"""The .cdga text format: one versioned, diffable description per file.

A document holds one or more named algebras plus optional modules,
algebra morphisms and module maps, so a single file can feed any
subcommand.  The short form with top-level fields describes exactly one
algebra; the sectioned form wraps each object in `algebra NAME` ... `end`
blocks and friends.  Rationals are written p/q, never floats.

Parsing is line-oriented; every error names the line (and the offending
token's column) so a hand-written file can be fixed without guesswork.
Serialization is canonical: fields in fixed order, entries sorted by
degree and basis position, so parse-serialize round-trips byte-stably.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cdga import CdgaMorphism, CdgaTable, Coeffs, MultKey, canon_key
from .dgmodule import DgModule, DgModuleMap, self_module
from .graded import CochainComplex, GradedMap, GradedSpace, InputError
from .linalg import Q, RatMatrix, Vector

FORMAT_VERSION = 1


class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class CdgaDocument:
    """Parsed contents of one .cdga file."""

    name: str
    version: int = FORMAT_VERSION
    algebras: dict[str, CdgaTable] = field(default_factory=dict)
    dimensions: dict[str, int] = field(default_factory=dict)
    orientations: dict[str, Vector] = field(default_factory=dict)
    morphisms: dict[str, CdgaMorphism] = field(default_factory=dict)
    modules: dict[str, DgModule] = field(default_factory=dict)
    modmaps: dict[str, DgModuleMap] = field(default_factory=dict)

    @property
    def primary(self) -> CdgaTable:
        if not self.algebras:
            raise InputError("document has no algebra")
        return next(iter(self.algebras.values()))

    @property
    def primary_name(self) -> str:
        return next(iter(self.algebras))

    def dimension_of(self, name: str | None = None) -> int | None:
        return self.dimensions.get(name or self.primary_name)

    def orientation_of(self, name: str | None = None) -> Vector | None:
        return self.orientations.get(name or self.primary_name)


# ---------------------------------------------------------------------------
# parsing


def _rat(tok: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok!r}", line, col) from None


class _AlgebraAccum:
    """Collects the field lines of one algebra until it can be built."""

    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.dimension: int | None = None
        self.truncation: int | None = None
        self.basis: dict[int, list[str]] = {}
        self.unit: str | None = None
        self.mult: list[tuple[int, str, str, Fraction, str]] = []
        self.diff: list[tuple[int, str, Fraction, str]] = []
        self.orientation: list[tuple[int, str, Fraction]] = []
        self.label_degree: dict[str, int] = {}
        self.label_index: dict[str, int] = {}

    def add_basis(self, deg: int, labels: list[str], line: int):
        for lab in labels:
            if lab in self.label_degree:
                raise ParseError(f"duplicate basis label {lab!r}", line)
            bucket = self.basis.setdefault(deg, [])
            self.label_degree[lab] = deg
            self.label_index[lab] = len(bucket)
            bucket.append(lab)

    def resolve(self, lab: str, line: int) -> tuple[int, int]:
        if lab not in self.label_degree:
            raise ParseError(f"unknown label {lab!r}", line)
        return self.label_degree[lab], self.label_index[lab]

    def build(self) -> tuple[CdgaTable, int | None, Vector | None]:
        if not self.basis:
            raise ParseError("algebra has no basis", self.line)
        if self.unit is None:
            raise ParseError("unit required", self.line)
        if self.label_degree.get(self.unit) != 0:
            raise ParseError(f"unit {self.unit!r} must have degree 0",
                             self.line)
        if len(self.basis.get(0, [])) != 1:
            raise ParseError("degree 0 must hold exactly the unit", self.line)
        sp = GradedSpace({p: tuple(v) for p, v in sorted(self.basis.items())},
                         self.truncation)

        dblocks: dict[int, list[list[Fraction]]] = {}
        for ln, x, c, y in self.diff:
            (p, i), (py, j) = self.resolve(x, ln), self.resolve(y, ln)
            if py != p + 1:
                raise ParseError(
                    f"diff {x} -> {y} must raise degree by 1 "
                    f"(got {p} -> {py})", ln)
            blk = dblocks.setdefault(
                p, [[Q(0)] * sp.dim(p) for _ in range(sp.dim(p + 1))])
            if blk[j][i] != 0:
                raise ParseError(f"duplicate diff entry {x} -> {y}", ln)
            blk[j][i] = c
        blocks = {p: RatMatrix(sp.dim(p + 1), sp.dim(p), rows)
                  for p, rows in dblocks.items()}
        cx = CochainComplex(sp, GradedMap(sp, sp, 1, blocks))

        mult: dict[MultKey, Coeffs] = {}
        seen: set[tuple[int, int, int, int, int]] = set()
        for ln, x, y, c, z in self.mult:
            (p, i), (q, j) = self.resolve(x, ln), self.resolve(y, ln)
            (r, t) = self.resolve(z, ln)
            if r != p + q:
                raise ParseError(
                    f"degree mismatch in mult {x} {y} -> {z}: "
                    f"{p} + {q} != {r}", ln)
            if p == 0 or q == 0:
                raise ParseError("unit products are implicit; "
                                 f"drop mult {x} {y}", ln)
            key, sgn = canon_key(p, i, q, j)
            if p == q and i == j and p % 2 == 1:
                raise ParseError(f"odd square {x}*{x} is zero over Q", ln)
            mark = key + (t,)
            if mark in seen:
                raise ParseError(f"duplicate mult entry {x} {y} -> {z}", ln)
            seen.add(mark)
            entry = mult.setdefault(key, {})
            val = entry.get(t, Q(0)) + sgn * c
            if val == 0:
                entry.pop(t, None)
            else:
                entry[t] = val
        mult = {k: v for k, v in mult.items() if v}

        table = CdgaTable(cx, self.unit, mult, name=self.name)

        eps: Vector | None = None
        n = self.dimension
        if self.orientation:
            degs = {self.resolve(lab, ln)[0] for ln, lab, _ in self.orientation}
            if len(degs) > 1:
                raise ParseError("orientation labels span several degrees",
                                 self.orientation[0][0])
            odeg = degs.pop()
            if n is not None and odeg != n:
                raise ParseError(
                    f"orientation sits in degree {odeg}, dimension says {n}",
                    self.orientation[0][0])
            n = odeg if n is None else n
            eps = [Q(0)] * sp.dim(odeg)
            for ln, lab, c in self.orientation:
                _, idx = self.resolve(lab, ln)
                eps[idx] = c
        return table, n, eps


class _ModuleAccum:
    def __init__(self, name: str, over: str, line: int):
        self.name = name
        self.over = over
        self.line = line
        self.truncation: int | None = None
        self.basis: dict[int, list[str]] = {}
        self.diff: list[tuple[int, str, Fraction, str]] = []
        self.act: list[tuple[int, str, str, Fraction, str]] = []
        self.label_degree: dict[str, int] = {}
        self.label_index: dict[str, int] = {}

    def add_basis(self, deg: int, labels: list[str], line: int):
        for lab in labels:
            if lab in self.label_degree:
                raise ParseError(f"duplicate basis label {lab!r}", line)
            bucket = self.basis.setdefault(deg, [])
            self.label_degree[lab] = deg
            self.label_index[lab] = len(bucket)
            bucket.append(lab)

    def resolve(self, lab: str, line: int) -> tuple[int, int]:
        if lab not in self.label_degree:
            raise ParseError(f"unknown module label {lab!r}", line)
        return self.label_degree[lab], self.label_index[lab]

    def build(self, alg: CdgaTable, alg_acc: _AlgebraAccum) -> DgModule:
        if not self.basis:
            raise ParseError("module has no basis", self.line)
        neg = min(self.basis) < 0
        sp = GradedSpace({p: tuple(v) for p, v in sorted(self.basis.items())},
                         self.truncation, negative_ok=neg)
        dblocks: dict[int, list[list[Fraction]]] = {}
        for ln, x, c, y in self.diff:
            (p, i), (py, j) = self.resolve(x, ln), self.resolve(y, ln)
            if py != p + 1:
                raise ParseError(f"mdiff {x} -> {y} must raise degree by 1", ln)
            blk = dblocks.setdefault(
                p, [[Q(0)] * sp.dim(p) for _ in range(sp.dim(p + 1))])
            if blk[j][i] != 0:
                raise ParseError(f"duplicate mdiff entry {x} -> {y}", ln)
            blk[j][i] = c
        blocks = {p: RatMatrix(sp.dim(p + 1), sp.dim(p), rows)
                  for p, rows in dblocks.items()}
        cx = CochainComplex(sp, GradedMap(sp, sp, 1, blocks))
        action: dict[tuple[int, int, int, int], Coeffs] = {}
        for ln, a, m, c, z in self.act:
            (q, i) = alg_acc.resolve(a, ln)
            (p, j) = self.resolve(m, ln)
            (r, t) = self.resolve(z, ln)
            if r != p + q:
                raise ParseError(
                    f"degree mismatch in act {a} {m} -> {z}", ln)
            if q == 0:
                raise ParseError("unit action is implicit; "
                                 f"drop act {a} {m}", ln)
            entry = action.setdefault((q, i, p, j), {})
            entry[t] = entry.get(t, Q(0)) + c
        action = {k: {t: c for t, c in v.items() if c != 0}
                  for k, v in action.items()}
        action = {k: v for k, v in action.items() if v}
        return DgModule(alg, cx, action, name=self.name)


def parse(text: str, name: str = "document") -> CdgaDocument:
    """Parse .cdga text; raises ParseError with a line number on any flaw."""
    doc_name = name
    lines = text.splitlines()
    header_seen = False
    top = _AlgebraAccum(doc_name, 1)
    top_used = False
    sections_used = False
    algebras: dict[str, _AlgebraAccum] = {}
    modules: dict[str, _ModuleAccum] = {}
    morphism_specs: list[tuple[int, str, str, str,
                               list[tuple[int, str, Fraction, str]]]] = []
    modmap_specs: list[tuple[int, str, str, str,
                             list[tuple[int, str, Fraction, str]]]] = []
    current: object = None      # _AlgebraAccum | _ModuleAccum | list (maps)

    def column_of(ln: str, tok: str) -> int:
        pos = ln.find(tok)
        return pos + 1 if pos >= 0 else 1

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kw = toks[0]
        if not header_seen:
            if kw != "cdga" or len(toks) != 2:
                raise ParseError("file must start with a 'cdga <version>' "
                                 "header", lineno)
            if toks[1] != str(FORMAT_VERSION):
                raise ParseError(f"unsupported format version {toks[1]}",
                                 lineno)
            header_seen = True
            continue

        def need(nargs: int, usage: str):
            if len(toks) != nargs + 1:
                raise ParseError(f"expected '{usage}'", lineno,
                                 column_of(raw, kw))

        def int_tok(s: str) -> int:
            try:
                return int(s)
            except ValueError:
                raise ParseError(f"expected an integer, got {s!r}", lineno,
                                 column_of(raw, s)) from None

        if kw == "name" and current is None:
            need(1, "name <ident>")
            doc_name = toks[1]
            top.name = doc_name
            continue

        if kw == "algebra":
            if current is not None:
                raise ParseError("nested section", lineno)
            if top_used:
                raise ParseError("cannot mix top-level fields with sections",
                                 lineno)
            need(1, "algebra <name>")
            if toks[1] in algebras:
                raise ParseError(f"algebra {toks[1]!r} already defined", lineno)
            current = _AlgebraAccum(toks[1], lineno)
            algebras[toks[1]] = current
            sections_used = True
            continue
        if kw == "module":
            if current is not None:
                raise ParseError("nested section", lineno)
            need(3, "module <name> over <algebra>")
            if toks[2] != "over":
                raise ParseError("expected 'module <name> over <algebra>'",
                                 lineno)
            if toks[3] not in algebras and not (top_used and toks[3] == doc_name):
                raise ParseError(f"unknown algebra {toks[3]!r}", lineno,
                                 column_of(raw, toks[3]))
            current = _ModuleAccum(toks[1], toks[3], lineno)
            if toks[1] in modules:
                raise ParseError(f"module {toks[1]!r} already defined", lineno)
            modules[toks[1]] = current
            sections_used = True
            continue
        if kw in ("morphism", "modmap"):
            if current is not None:
                raise ParseError("nested section", lineno)
            need(4, f"{kw} <name> <source> -> <target>")
            if toks[3] != "->":
                raise ParseError(f"expected '{kw} <name> <source> -> "
                                 "<target>'", lineno)
            maps: list[tuple[int, str, Fraction, str]] = []
            spec = (lineno, toks[1], toks[2], toks[4], maps)
            (morphism_specs if kw == "morphism" else modmap_specs).append(spec)
            current = maps
            sections_used = True
            continue
        if kw == "end":
            if current is None:
                raise ParseError("'end' outside any section", lineno)
            current = None
            continue

        if isinstance(current, list):
            if kw != "map":
                raise ParseError(f"only 'map' lines allowed here, got {kw!r}",
                                 lineno)
            need(3, "map <source-label> <coeff> <target-label>")
            current.append((lineno, toks[1],
                            _rat(toks[2], lineno, column_of(raw, toks[2])),
                            toks[3]))
            continue

        if isinstance(current, _ModuleAccum):
            acc = current
            if kw == "mbasis":
                if len(toks) < 3:
                    raise ParseError("expected 'mbasis <degree> <labels...>'",
                                     lineno)
                acc.add_basis(int_tok(toks[1]), toks[2:], lineno)
            elif kw == "mdiff":
                need(3, "mdiff <label> <coeff> <label>")
                acc.diff.append((lineno, toks[1],
                                 _rat(toks[2], lineno, column_of(raw, toks[2])),
                                 toks[3]))
            elif kw == "act":
                need(4, "act <algebra-label> <module-label> <coeff> <label>")
                acc.act.append((lineno, toks[1], toks[2],
                                _rat(toks[3], lineno, column_of(raw, toks[3])),
                                toks[4]))
            elif kw == "truncation":
                need(1, "truncation <N|none>")
                acc.truncation = None if toks[1] == "none" else int_tok(toks[1])
            else:
                raise ParseError(f"unknown module field {kw!r}", lineno)
            continue

        # algebra fields, either top-level or inside an algebra section
        if isinstance(current, _AlgebraAccum):
            acc = current
        else:
            if sections_used:
                raise ParseError("cannot mix top-level fields with sections",
                                 lineno)
            acc = top
            top_used = True
        if kw == "basis":
            if len(toks) < 3:
                raise ParseError("expected 'basis <degree> <labels...>'",
                                 lineno)
            acc.add_basis(int_tok(toks[1]), toks[2:], lineno)
        elif kw == "unit":
            need(1, "unit <label>")
            if acc.unit is not None:
                raise ParseError("unit given twice", lineno)
            acc.unit = toks[1]
        elif kw == "dimension":
            need(1, "dimension <n>")
            acc.dimension = int_tok(toks[1])
        elif kw == "truncation":
            need(1, "truncation <N|none>")
            acc.truncation = None if toks[1] == "none" else int_tok(toks[1])
        elif kw == "mult":
            need(4, "mult <x> <y> <coeff> <z>")
            acc.mult.append((lineno, toks[1], toks[2],
                             _rat(toks[3], lineno, column_of(raw, toks[3])),
                             toks[4]))
        elif kw == "diff":
            need(3, "diff <x> <coeff> <y>")
            acc.diff.append((lineno, toks[1],
                             _rat(toks[2], lineno, column_of(raw, toks[2])),
                             toks[3]))
        elif kw == "orientation":
            need(2, "orientation <label> <coeff>")
            acc.orientation.append((lineno, toks[1],
                                    _rat(toks[2], lineno,
                                         column_of(raw, toks[2]))))
        else:
            raise ParseError(f"unknown field {kw!r}", lineno)

    if current is not None:
        raise ParseError("unterminated section (missing 'end')", len(lines))
    if not header_seen:
        raise ParseError("empty document; 'cdga 1' header required", 1)

    doc = CdgaDocument(doc_name)
    built_acc: dict[str, _AlgebraAccum] = {}
    if top_used:
        algebras = {doc_name: top}
    for alg_name, acc in algebras.items():
        table, n, eps = acc.build()
        doc.algebras[alg_name] = table
        built_acc[alg_name] = acc
        if n is not None:
            doc.dimensions[alg_name] = n
        if eps is not None:
            doc.orientations[alg_name] = eps
    for mod_name, macc in modules.items():
        over = macc.over if macc.over in doc.algebras else doc.primary_name
        doc.modules[mod_name] = macc.build(doc.algebras[over],
                                           built_acc[over])

    def build_blocks(src_sp: GradedSpace, tgt_sp: GradedSpace,
                     resolve_src, resolve_tgt,
                     maps: list[tuple[int, str, Fraction, str]]
                     ) -> dict[int, RatMatrix]:
        rows: dict[int, list[list[Fraction]]] = {}
        for ln, x, c, y in maps:
            (p, i) = resolve_src(x, ln)
            (q, j) = resolve_tgt(y, ln)
            if q != p:
                raise ParseError(
                    f"map {x} -> {y} must preserve degree ({p} vs {q})", ln)
            blk = rows.setdefault(
                p, [[Q(0)] * src_sp.dim(p) for _ in range(tgt_sp.dim(p))])
            blk[j][i] = blk[j][i] + c
        return {p: RatMatrix(tgt_sp.dim(p), src_sp.dim(p), r)
                for p, r in rows.items()}

    for ln, mname, src, tgt, maps in morphism_specs:
        if src not in doc.algebras:
            raise ParseError(f"unknown algebra {src!r}", ln)
        if tgt not in doc.algebras:
            raise ParseError(f"unknown algebra {tgt!r}", ln)
        s, t = doc.algebras[src], doc.algebras[tgt]
        blocks = build_blocks(s.space, t.space,
                              built_acc[src].resolve, built_acc[tgt].resolve,
                              maps)
        unit_blk = blocks.setdefault(0, RatMatrix(1, 1))
        if unit_blk.data[0][0] == 0:
            unit_blk.data[0][0] = Q(1)
        doc.morphisms[mname] = CdgaMorphism(
            s, t, GradedMap(s.space, t.space, 0, blocks), name=mname)
    for ln, mname, src, tgt, maps in modmap_specs:
        if src not in doc.modules:
            raise ParseError(f"unknown module {src!r}", ln)
        if tgt not in doc.algebras:
            raise ParseError(f"unknown algebra {tgt!r}", ln)
        mod = doc.modules[src]
        alg = doc.algebras[tgt]
        if mod.algebra is not alg:
            raise ParseError(f"module {src!r} is not over {tgt!r}", ln)
        reg = self_module(alg)
        blocks = build_blocks(mod.space, alg.space,
                              modules[src].resolve, built_acc[tgt].resolve,
                              maps)
        doc.modmaps[mname] = DgModuleMap(
            mod, reg, GradedMap(mod.space, alg.space, 0, blocks), name=mname)
    return doc


# ---------------------------------------------------------------------------
# serialization


def _fmt_rat(c: Fraction) -> str:
    return str(c)


def _algebra_lines(alg_name: str, table: CdgaTable, n: int | None,
                   eps: Vector | None, indent: str) -> list[str]:
    out: list[str] = []
    sp = table.space
    if n is not None:
        out.append(f"{indent}dimension {n}")
    if sp.truncation is not None:
        out.append(f"{indent}truncation {sp.truncation}")
    for p in sp.degrees():
        out.append(f"{indent}basis {p} " + " ".join(sp.labels(p)))
    out.append(f"{indent}unit {table.unit}")
    for p in sp.degrees():
        blk = table.complex.d.block(p)
        for i in range(sp.dim(p)):
            for j in range(sp.dim(p + 1)):
                c = blk.data[j][i]
                if c != 0:
                    out.append(f"{indent}diff {sp.labels(p)[i]} {_fmt_rat(c)} "
                               f"{sp.labels(p + 1)[j]}")
    for (p, i, q, j) in sorted(table.mult):
        entry = table.mult[(p, i, q, j)]
        for t in sorted(entry):
            out.append(f"{indent}mult {sp.labels(p)[i]} {sp.labels(q)[j]} "
                       f"{_fmt_rat(entry[t])} {sp.labels(p + q)[t]}")
    if eps is not None and n is not None:
        for i, c in enumerate(eps):
            if c != 0:
                out.append(f"{indent}orientation {sp.labels(n)[i]} "
                           f"{_fmt_rat(c)}")
    return out


def serialize(doc: CdgaDocument) -> str:
    """Canonical text for a document; parse(serialize(d)) == parse-of-d."""
    out = [f"cdga {FORMAT_VERSION}", f"name {doc.name}"]
    single = (len(doc.algebras) == 1 and not doc.modules
              and not doc.morphisms and not doc.modmaps)
    if single:
        aname = doc.primary_name
        out += _algebra_lines(aname, doc.primary, doc.dimensions.get(aname),
                              doc.orientations.get(aname), "")
        return "\n".join(out) + "\n"
    for aname, table in doc.algebras.items():
        out.append(f"algebra {aname}")
        out += _algebra_lines(aname, table, doc.dimensions.get(aname),
                              doc.orientations.get(aname), "  ")
        out.append("end")
    for mname, mod in doc.modules.items():
        alg_name = next(a for a, t in doc.algebras.items()
                        if t is mod.algebra)
        out.append(f"module {mname} over {alg_name}")
        sp = mod.space
        if sp.truncation is not None:
            out.append(f"  truncation {sp.truncation}")
        for p in sp.degrees():
            out.append(f"  mbasis {p} " + " ".join(sp.labels(p)))
        for p in sp.degrees():
            blk = mod.complex.d.block(p)
            for i in range(sp.dim(p)):
                for j in range(sp.dim(p + 1)):
                    c = blk.data[j][i]
                    if c != 0:
                        out.append(f"  mdiff {sp.labels(p)[i]} {_fmt_rat(c)} "
                                   f"{sp.labels(p + 1)[j]}")
        asp = mod.algebra.space
        for (q, i, p, j) in sorted(mod.action):
            entry = mod.action[(q, i, p, j)]
            for t in sorted(entry):
                out.append(f"  act {asp.labels(q)[i]} {sp.labels(p)[j]} "
                           f"{_fmt_rat(entry[t])} {sp.labels(p + q)[t]}")
        out.append("end")
    for mname, mor in doc.morphisms.items():
        src = next(a for a, t in doc.algebras.items() if t is mor.source)
        tgt = next(a for a, t in doc.algebras.items() if t is mor.target)
        out.append(f"morphism {mname} {src} -> {tgt}")
        out += _map_lines(mor.map, mor.source.space, mor.target.space,
                          skip_unit=True)
        out.append("end")
    for mname, mm in doc.modmaps.items():
        src = next(m for m, x in doc.modules.items() if x is mm.source)
        tgt = next(a for a, t in doc.algebras.items()
                   if t is mm.target.algebra)
        out.append(f"modmap {mname} {src} -> {tgt}")
        out += _map_lines(mm.map, mm.source.space, mm.target.space,
                          skip_unit=False)
        out.append("end")
    return "\n".join(out) + "\n"


def parse_file(path: str) -> CdgaDocument:
    import os

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(path))[0]
    return parse(text, name=stem)


def _map_lines(gm: GradedMap, src: GradedSpace, tgt: GradedSpace,
               skip_unit: bool) -> list[str]:
    out = []
    for p in src.degrees():
        blk = gm.block(p)
        for i in range(src.dim(p)):
            for j in range(tgt.dim(p)):
                c = blk.data[j][i]
                if c == 0:
                    continue
                if skip_unit and p == 0 and i == 0 and j == 0 and c == 1:
                    continue
                out.append(f"  map {src.labels(p)[i]} {_fmt_rat(c)} "
                           f"{tgt.labels(p)[j]}")
    return out
