"""Line-oriented text format for signatures, structures, sentences and lattices.

A document is a sequence of blocks, each closed by ``end``::

    signature graph
      rel E 2
    end
    structure K2 over graph
      size 2
      E 0 1
      E 1 0
    end

``#`` starts a comment.  Structures may refer to a signature declared
earlier in the same document or to a built-in one (``graph``, ``unary``).
Serialization is canonical: relations in signature order, tuples sorted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import GRAPH, UNARY
from .lattices import BoundedLattice, LatticeError, validate_lattice
from .logic import FormulaError, Sentence, parse_sentence
from .structures import RelStructure, Signature, validate

log = logging.getLogger(__name__)

BUILTIN_SIGNATURES = {s.name: s for s in (GRAPH, UNARY)}


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = ""):
        where = f"{source}:" if source else ""
        where += f"{line}: " if line is not None else (": " if source else "")
        super().__init__(f"{where}{message}")
        self.line = line


@dataclass
class Document:
    signatures: dict[str, Signature] = field(default_factory=dict)
    structures: dict[str, RelStructure] = field(default_factory=dict)
    sentences: dict[str, Sentence] = field(default_factory=dict)
    lattices: dict[str, BoundedLattice] = field(default_factory=dict)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split(), line


def _int(tok: str, no: int, src: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, found {tok!r}", no, src) from None
    return v


def parse_document(text: str, source: str = "") -> Document:
    doc = Document()
    sigs = dict(BUILTIN_SIGNATURES)
    it = _lines(text)

    def body(start: int, what: str):
        for no, toks, line in it:
            if toks == ["end"]:
                return
            yield no, toks, line
        raise FormatError(f"{what} block opened here is missing 'end'", start, source)

    for no, toks, _ in it:
        head = toks[0]
        if head == "signature":
            if len(toks) != 2:
                raise FormatError("usage: signature <name>", no, source)
            rels = []
            for rno, rt, _ in body(no, "signature"):
                if len(rt) != 3 or rt[0] != "rel":
                    raise FormatError("usage: rel <RelName> <arity>", rno, source)
                rels.append((rt[1], _int(rt[2], rno, source)))
            try:
                sig = Signature(toks[1], tuple(rels))
            except ValueError as exc:
                raise FormatError(str(exc), no, source) from None
            sigs[sig.name] = doc.signatures[sig.name] = sig
        elif head == "structure":
            if len(toks) != 4 or toks[2] != "over":
                raise FormatError("usage: structure <name> over <signature>", no, source)
            doc.structures[toks[1]] = _structure(toks[1], toks[3], sigs, body(no, "structure"), no, source)
        elif head == "sentence":
            if len(toks) != 4 or toks[2] != "over":
                raise FormatError("usage: sentence <name> over <signature>", no, source)
            if toks[3] not in sigs:
                raise FormatError(f"unknown signature {toks[3]!r}", no, source)
            parts = [(sno, line) for sno, _, line in body(no, "sentence")]
            if not parts:
                raise FormatError("empty sentence", no, source)
            text_ = " ".join(line for _, line in parts)
            try:
                doc.sentences[toks[1]] = parse_sentence(text_, sigs[toks[3]], name=toks[1])
            except FormulaError as exc:
                raise FormatError(f"sentence {toks[1]}: {exc}", parts[0][0], source) from None
        elif head == "lattice":
            if len(toks) != 2:
                raise FormatError("usage: lattice <name>", no, source)
            doc.lattices[toks[1]] = _lattice(toks[1], body(no, "lattice"), no, source)
        else:
            raise FormatError(f"unknown block keyword {head!r}", no, source)
    return doc


def _structure(name, sig_name, sigs, lines, start, src) -> RelStructure:
    if sig_name not in sigs:
        raise FormatError(f"unknown signature {sig_name!r}", start, src)
    sig = sigs[sig_name]
    size = None
    tables: dict[str, set[tuple[int, ...]]] = {r: set() for r in sig.names}
    for no, toks, _ in lines:
        if toks[0] == "size":
            if size is not None or len(toks) != 2:
                raise FormatError("exactly one 'size <n>' line is allowed", no, src)
            size = _int(toks[1], no, src)
            if size < 0:
                raise FormatError("size must be non-negative", no, src)
            continue
        if size is None:
            raise FormatError("'size' must come before any tuple", no, src)
        rel = toks[0]
        if rel not in sig:
            raise FormatError(f"relation {rel!r} not in signature {sig.name!r}", no, src)
        t = tuple(_int(v, no, src) for v in toks[1:])
        if len(t) != sig.arity(rel):
            raise FormatError(f"{rel} has arity {sig.arity(rel)} but {len(t)} entries were given", no, src)
        if any(not 0 <= v < size for v in t):
            raise FormatError(f"tuple {t} has an entry outside the universe of size {size}", no, src)
        if t in tables[rel]:
            log.warning("%s:%d: duplicate tuple %s %s collapsed", src or name, no, rel, t)
        tables[rel].add(t)
    if size is None:
        raise FormatError("structure has no 'size' line", start, src)
    s = RelStructure(sig, size, tables, name=name)
    bad = validate(s)
    if bad is not None:
        raise FormatError(f"invalid structure: {bad}", start, src)
    return s


def _lattice(name, lines, start, src) -> BoundedLattice:
    size = bottom = top = None
    ops: dict[str, dict[tuple[int, int], int]] = {"join": {}, "meet": {}}

    def put(op: str, r: int, c: int, v: int, no: int) -> None:
        for key in ((r, c), (c, r)):
            prev = ops[op].get(key)
            if prev is not None and prev != v:
                raise FormatError(f"{op}({key[0]},{key[1]}) given as both {prev} and {v}", no, src)
            ops[op][key] = v

    for no, toks, _ in lines:
        kw, vals = toks[0], [_int(v, no, src) for v in toks[1:]]
        if kw in ("size", "bottom", "top"):
            if len(vals) != 1:
                raise FormatError(f"usage: {kw} <int>", no, src)
            if kw == "size":
                size = vals[0]
            elif kw == "bottom":
                bottom = vals[0]
            else:
                top = vals[0]
        elif kw in ("join", "meet"):
            if len(vals) != 3:
                raise FormatError(f"usage: {kw} <row> <col> <value>", no, src)
            put(kw, *vals, no)
        elif kw in ("joinrow", "meetrow"):
            if size is None or len(vals) != size + 1:
                raise FormatError(f"usage: {kw} <row> followed by one value per column", no, src)
            for c, v in enumerate(vals[1:]):
                put(kw[:-3], vals[0], c, v, no)
        else:
            raise FormatError(f"unknown lattice keyword {kw!r}", no, src)
    if size is None or bottom is None or top is None:
        raise FormatError("lattice needs size, bottom and top", start, src)
    tabs = {}
    for op, entries in ops.items():
        missing = [(r, c) for r in range(size) for c in range(size) if (r, c) not in entries]
        if missing:
            raise FormatError(f"{op} table incomplete, first gap at {missing[0]}", start, src)
        tabs[op] = tuple(tuple(entries[(r, c)] for c in range(size)) for r in range(size))
    try:
        return validate_lattice(BoundedLattice(size, tabs["join"], tabs["meet"], bottom, top, name))
    except LatticeError as exc:
        raise FormatError(str(exc), start, src) from None


def serialize_signature(sig: Signature) -> str:
    rows = "".join(f"  rel {r} {a}\n" for r, a in sig.relations)
    return f"signature {sig.name}\n{rows}end\n"


def serialize_structure(s: RelStructure, name: str | None = None, with_signature: bool = True) -> str:
    label = name or s.name or "S"
    out = serialize_signature(s.signature) if with_signature else ""
    out += f"structure {label} over {s.signature.name}\n  size {s.size}\n"
    for rel, t in s.all_tuples():
        out += f"  {rel} {' '.join(map(str, t))}\n"
    return out + "end\n"


def serialize_sentence(s: Sentence, name: str | None = None) -> str:
    return f"sentence {name or s.name or 'phi'} over {s.signature.name}\n  {s}\nend\n"


def serialize_lattice(lat: BoundedLattice, name: str | None = None) -> str:
    out = f"lattice {name or lat.name or 'L'}\n  size {lat.size}\n  bottom {lat.bottom}\n  top {lat.top}\n"
    for op, tab in (("joinrow", lat.join), ("meetrow", lat.meet)):
        for r, row in enumerate(tab):
            out += f"  {op} {r} {' '.join(map(str, row))}\n"
    return out + "end\n"


def parse_structure(text: str, source: str = "") -> RelStructure:
    """The single structure in ``text`` (error if there is not exactly one)."""
    doc = parse_document(text, source)
    if len(doc.structures) != 1:
        raise FormatError(f"expected exactly one structure, found {len(doc.structures)}", None, source)
    return next(iter(doc.structures.values()))


def read_document(path: str | Path) -> Document:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read: {exc.strerror}", None, str(p)) from None
    return parse_document(text, str(p))
