"""Prenex first-order sentences over relational signatures.

Grammar (whitespace-insensitive)::

    sent  := quant* "." body
    quant := ("forall" | "exists") ident+
    body  := impl
    impl  := disj ("->" impl)?
    disj  := conj ("|" conj)*
    conj  := lit ("&" lit)*
    lit   := "~" lit | atom | "(" body ")"
    atom  := RelName "(" ident ("," ident)* ")" | ident "=" ident

Evaluation is brute force over all assignments.  Equality atoms are
accepted everywhere and count as atomic formulas when classifying
anti-identities.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .structures import RelStructure, Signature

DEFAULT_EVAL_BOUND = 10_000_000


class FormulaError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class FormulaSyntaxError(FormulaError):
    pass


class EvaluationBoundError(RuntimeError):
    pass


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.rel}({','.join(self.args)})"


@dataclass(frozen=True)
class Eq:
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    items: tuple[Formula, ...]


@dataclass(frozen=True)
class Or:
    items: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies:
    premise: Formula
    conclusion: Formula


Formula = Union[Atom, Eq, Not, And, Or, Implies]

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Atom: 5, Eq: 5}


def format_formula(f: Formula, parent: int = 0) -> str:
    prec = _PREC[type(f)]
    if isinstance(f, (Atom, Eq)):
        text = str(f)
    elif isinstance(f, Not):
        inner = f.body
        text = "~" + format_formula(inner, 4)
        if isinstance(inner, Eq):
            text = f"~({inner})"
    elif isinstance(f, And):
        text = " & ".join(format_formula(g, prec + 1) for g in f.items)
    elif isinstance(f, Or):
        text = " | ".join(format_formula(g, prec + 1) for g in f.items)
    else:
        text = f"{format_formula(f.premise, prec + 1)} -> {format_formula(f.conclusion, prec)}"
    return f"({text})" if prec < parent else text


@dataclass(frozen=True)
class Sentence:
    prefix: tuple[tuple[str, str], ...]  # (quantifier, variable); quantifier is "forall" or "exists"
    matrix: Formula
    signature: Signature
    name: str = ""

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.prefix)

    def __str__(self) -> str:
        groups: list[list[str]] = []
        for q, v in self.prefix:
            if groups and groups[-1][0] == q:
                groups[-1].append(v)
            else:
                groups.append([q, v])
        head = " ".join(" ".join(g) for g in groups)
        body = format_formula(self.matrix)
        return f"{head} . {body}" if head else f". {body}"


_TOKEN = re.compile(r"\s*(?:(?P<arrow>->)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>[().,~&|=]))")


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while True:
        while pos < len(text) and text[pos].isspace():
            if text[pos] == "\n":
                line += 1
                line_start = pos + 1
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        col = m.start(m.lastgroup) - line_start + 1
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind if kind != "sym" else value, value, line, col))
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, signature: Signature):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature
        self.bound: set[str] = set()

    def peek(self, ahead: int = 0) -> tuple[str, str, int, int]:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self, kind: str | None = None) -> tuple[str, str, int, int]:
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            found = tok[1] or "end of input"
            raise FormulaSyntaxError(f"expected {kind!r}, found {found!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def sentence(self, name: str) -> Sentence:
        prefix = []
        while self.peek()[0] == "ident" and self.peek()[1] in ("forall", "exists"):
            q = self.take()[1]
            if self.peek()[0] != "ident" or self.peek()[1] in ("forall", "exists"):
                tok = self.peek()
                raise FormulaSyntaxError(f"quantifier {q!r} needs at least one variable", tok[2], tok[3])
            while self.peek()[0] == "ident" and self.peek()[1] not in ("forall", "exists"):
                tok = self.take()
                if tok[1] in self.bound:
                    raise FormulaSyntaxError(f"variable {tok[1]!r} bound twice", tok[2], tok[3])
                self.bound.add(tok[1])
                prefix.append((q, tok[1]))
        self.take(".")
        body = self.impl()
        self.take("eof")
        return Sentence(tuple(prefix), body, self.sig, name)

    def impl(self) -> Formula:
        left = self.disj()
        if self.peek()[0] == "arrow":
            self.take()
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        items = [self.conj()]
        while self.peek()[0] == "|":
            self.take()
            items.append(self.conj())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conj(self) -> Formula:
        items = [self.lit()]
        while self.peek()[0] == "&":
            self.take()
            items.append(self.lit())
        return items[0] if len(items) == 1 else And(tuple(items))

    def lit(self) -> Formula:
        kind = self.peek()[0]
        if kind == "~":
            self.take()
            return Not(self.lit())
        if kind == "(":
            self.take()
            body = self.impl()
            self.take(")")
            return body
        return self.atom()

    def var(self) -> str:
        tok = self.take("ident")
        if tok[1] not in self.bound:
            raise FormulaError(f"unbound variable {tok[1]!r}", tok[2], tok[3])
        return tok[1]

    def atom(self) -> Formula:
        tok = self.peek()
        if tok[0] != "ident":
            raise FormulaSyntaxError(f"expected an atom, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        if self.peek(1)[0] == "(":
            name = self.take()[1]
            if name not in self.sig:
                raise FormulaError(f"unknown relation {name!r}", tok[2], tok[3])
            self.take("(")
            args = [self.var()]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.var())
            self.take(")")
            if len(args) != self.sig.arity(name):
                raise FormulaError(f"relation {name} has arity {self.sig.arity(name)}, got {len(args)} arguments",
                                   tok[2], tok[3])
            return Atom(name, tuple(args))
        left = self.var()
        self.take("=")
        return Eq(left, self.var())


def parse_sentence(text: str, signature: Signature, name: str = "") -> Sentence:
    return _Parser(text, signature).sentence(name)


def _compile(f: Formula, slot: dict[str, int], structure: RelStructure) -> Callable[[list[int]], bool]:
    if isinstance(f, Atom):
        tab = structure.table(f.rel)
        idx = tuple(slot[v] for v in f.args)
        if len(idx) == 1:
            i0 = idx[0]
            return lambda env: (env[i0],) in tab
        if len(idx) == 2:
            i0, i1 = idx
            return lambda env: (env[i0], env[i1]) in tab
        return lambda env: tuple(env[i] for i in idx) in tab
    if isinstance(f, Eq):
        i0, i1 = slot[f.left], slot[f.right]
        return lambda env: env[i0] == env[i1]
    if isinstance(f, Not):
        g = _compile(f.body, slot, structure)
        return lambda env: not g(env)
    if isinstance(f, And):
        gs = [_compile(g, slot, structure) for g in f.items]
        return lambda env: all(g(env) for g in gs)
    if isinstance(f, Or):
        gs = [_compile(g, slot, structure) for g in f.items]
        return lambda env: any(g(env) for g in gs)
    p, c = _compile(f.premise, slot, structure), _compile(f.conclusion, slot, structure)
    return lambda env: (not p(env)) or c(env)


def models(structure: RelStructure, sentence: Sentence, bound: int = DEFAULT_EVAL_BOUND) -> bool:
    """Tarskian truth by exhaustive assignment enumeration."""
    if not structure.signature.same_shape(sentence.signature):
        raise ValueError("sentence and structure signatures differ")
    q = len(sentence.prefix)
    if structure.size ** q > bound:
        raise EvaluationBoundError(f"{structure.size}^{q} assignments exceed bound {bound}")
    slot = {v: i for i, v in enumerate(sentence.variables)}
    matrix = _compile(sentence.matrix, slot, structure)
    quants = [q for q, _ in sentence.prefix]
    env = [0] * q
    universe = range(structure.size)

    def holds(depth: int) -> bool:
        if depth == q:
            return matrix(env)
        if quants[depth] == "forall":
            for v in universe:
                env[depth] = v
                if not holds(depth + 1):
                    return False
            return True
        for v in universe:
            env[depth] = v
            if holds(depth + 1):
                return True
        return False

    return holds(0)


class AxiomClass(enum.Enum):
    REFLEXIVITY = "REFLEXIVITY"
    ANTI_IDENTITY = "ANTI_IDENTITY"
    PINCH_SAFE_IMPLICATION = "PINCH_SAFE_IMPLICATION"
    OTHER = "OTHER"

    @property
    def closure_guaranteed(self) -> bool:
        return self is not AxiomClass.OTHER


def _disjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return [d for g in f.items for d in _disjuncts(g)]
    return [f]


def classify_axiom(s: Sentence) -> AxiomClass:
    universal = all(q == "forall" for q, _ in s.prefix)
    m = s.matrix
    if (len(s.prefix) == 1 and universal and isinstance(m, Atom)
            and all(v == s.prefix[0][1] for v in m.args)):
        return AxiomClass.REFLEXIVITY
    if universal and all(isinstance(d, Not) and isinstance(d.body, (Atom, Eq)) for d in _disjuncts(m)):
        return AxiomClass.ANTI_IDENTITY
    if universal and isinstance(m, Implies) and isinstance(m.premise, Atom) and isinstance(m.conclusion, Atom):
        prem = m.premise.args
        if (len(set(prem)) == len(prem) and set(prem) == set(s.variables)
                and set(m.conclusion.args) <= set(prem)):
            return AxiomClass.PINCH_SAFE_IMPLICATION
    return AxiomClass.OTHER


@dataclass(frozen=True)
class ClosureCheck:
    axiom: str
    construction: str
    passed: bool


@dataclass(frozen=True)
class ClosureReport:
    checks: tuple[ClosureCheck, ...]
    classes: tuple[tuple[str, AxiomClass], ...]

    @property
    def failures(self) -> tuple[ClosureCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def empirical_only(self) -> tuple[str, ...]:
        """Axioms whose syntactic shape carries no closure guarantee."""
        return tuple(name for name, cls in self.classes if not cls.closure_guaranteed)


def _axiom_label(s: Sentence, k: int) -> str:
    return s.name or f"axiom{k}:{s}"


def check_closure(axioms: Sequence[Sentence], samples: Sequence[RelStructure], max_n: int,
                  bound: int = DEFAULT_EVAL_BOUND) -> ClosureReport:
    """Evaluate every axiom on pinches, their two sides, and pairwise disjoint unions of the samples."""
    from .constructions import b_left, b_right, disjoint_union, n_pinch

    labels = [_axiom_label(s, k) for k, s in enumerate(axioms)]
    for sample in samples:
        for label, s in zip(labels, axioms):
            if not models(sample, s, bound):
                raise ValueError(f"sample {sample.name or sample} does not satisfy {label}")
    built: list[tuple[str, RelStructure]] = []
    for si, sample in enumerate(samples):
        tag = sample.name or f"sample{si}"
        for n in range(1, max_n + 1):
            p = n_pinch(sample, n)
            built.append((f"P{n}({tag})", p.underlying))
            built.append((f"BR[P{n}({tag})]", b_right(p).structure))
            built.append((f"BL[P{n}({tag})]", b_left(p).structure))
    for i in range(len(samples)):
        for j in range(i, len(samples)):
            ti = samples[i].name or f"sample{i}"
            tj = samples[j].name or f"sample{j}"
            built.append((f"{ti}+{tj}", disjoint_union([samples[i], samples[j]])[0]))
    checks = tuple(ClosureCheck(label, cname, models(struct, s, bound))
                   for cname, struct in built for label, s in zip(labels, axioms))
    classes = tuple((label, classify_axiom(s)) for label, s in zip(labels, axioms))
    return ClosureReport(checks, classes)


def conjunction_holds(structure: RelStructure, sentences: Iterable[Sentence], bound: int = DEFAULT_EVAL_BOUND) -> bool:
    return all(models(structure, s, bound) for s in sentences)
