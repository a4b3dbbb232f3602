"""Finite duality via the pinch criterion, obstructions, and anti-identities.

``duality_upto`` looks for the least ``n`` with a homomorphism from the
n-pinch back onto the template.  Finding one certifies finite duality;
not finding one up to the bound proves nothing beyond the bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .constructions import INF, ExtendedNat, diameter, distances_from, n_pinch
from .logic import Atom, Eq, Not, Or, Sentence
from .solver import DEFAULT, SearchConfig, find_hom, is_hom_independent, maps_into_some
from .structures import (
    Homomorphism,
    RelStructure,
    Signature,
    SizeBoundError,
    enumerate_proper_weak_substructures,
    induced_substructure,
    is_homomorphism,
    remove_tuple,
)

DUALITY_AT = "DUALITY_AT"
NO_DUALITY_UP_TO = "NO_DUALITY_UP_TO"


@dataclass(frozen=True)
class DualityVerdict:
    template: str
    outcome: str
    n: int
    witness: Homomorphism | None = None

    @property
    def has_duality(self) -> bool:
        return self.outcome == DUALITY_AT

    def __str__(self) -> str:
        return f"{self.outcome} {self.n}"


def duality_upto(template: RelStructure, N: int = 8, config: SearchConfig = DEFAULT) -> DualityVerdict:
    """Least ``n <= N`` such that ``P_n(template)`` maps to the template."""
    if N < 1:
        raise ValueError("N must be at least 1")
    for n in range(1, N + 1):
        pinch = n_pinch(template, n)
        hom = find_hom(pinch.underlying, template, config)
        if hom is not None:
            assert hom.is_valid()
            return DualityVerdict(template.name, DUALITY_AT, n, hom)
    return DualityVerdict(template.name, NO_DUALITY_UP_TO, N)


@dataclass(frozen=True)
class FamilyVerdict:
    verdicts: tuple[DualityVerdict, ...]
    diameter_bound: int | None
    failing: int | None

    @property
    def has_duality(self) -> bool:
        return self.failing is None


def colour_family_duality(family: Sequence[RelStructure], N: int = 8,
                          config: SearchConfig = DEFAULT) -> FamilyVerdict:
    """Per-template verdicts; with every template dual, the bound ``sum(l_i) + 2m``."""
    if not is_hom_independent(family, config):
        raise ValueError("family is not homomorphism-independent")
    verdicts = tuple(duality_upto(a, N, config) for a in family)
    for j, v in enumerate(verdicts):
        if not v.has_duality:
            return FamilyVerdict(verdicts, None, j)
    return FamilyVerdict(verdicts, sum(v.n for v in verdicts) + 2 * len(family), None)


def _slots(signature: Signature, n: int) -> list[tuple[int, tuple[int, ...]]]:
    return [(ri, t) for ri, (_, arity) in enumerate(signature.relations)
            for t in itertools.product(range(n), repeat=arity)]


def enumerate_structures(signature: Signature, max_size: int, min_size: int = 0,
                         bound: int = 1 << 22) -> Iterator[RelStructure]:
    """One representative per isomorphism class, by size then canonical code.

    A labelled structure is a bitmask over all possible tuples; the
    representative of a class is its member with the least mask.
    """
    for n in range(min_size, max_size + 1):
        slots = _slots(signature, n)
        if 1 << len(slots) > bound:
            raise SizeBoundError(f"2^{len(slots)} labelled structures of size {n} exceed bound {bound}")
        position = {s: i for i, s in enumerate(slots)}
        chunks = (len(slots) + 7) // 8
        tables = []
        for perm in itertools.permutations(range(n)):
            if perm == tuple(range(n)):
                continue
            images = [position[(ri, tuple(perm[v] for v in t))] for ri, t in slots]
            per_chunk = []
            for c in range(chunks):
                tab = [0] * 256
                for byte in range(256):
                    out = 0
                    for bit in range(8):
                        k = 8 * c + bit
                        if k < len(slots) and (byte >> bit) & 1:
                            out |= 1 << images[k]
                    tab[byte] = out
                per_chunk.append(tab)
            tables.append(per_chunk)
        for mask in range(1 << len(slots)):
            canonical = True
            for per_chunk in tables:
                image = 0
                m = mask
                for tab in per_chunk:
                    image |= tab[m & 255]
                    m >>= 8
                if image < mask:
                    canonical = False
                    break
            if canonical:
                tabs: list[list[tuple[int, ...]]] = [[] for _ in signature.relations]
                for k, (ri, t) in enumerate(slots):
                    if (mask >> k) & 1:
                        tabs[ri].append(t)
                yield RelStructure(signature, n, tabs, name=f"S{n}_{mask}")


@dataclass(frozen=True)
class ObstructionRecord:
    structure: RelStructure
    critical: bool
    diameter: ExtendedNat


def is_critical(c: RelStructure, family: Sequence[RelStructure], config: SearchConfig = DEFAULT,
                exhaustive: bool = False) -> bool:
    """``c`` maps into no family member but every proper weak substructure does.

    Membership is closed under weak substructures, so checking the maximal
    ones (drop one element, or drop one tuple) is enough; ``exhaustive``
    instead walks every proper weak substructure.
    """
    if maps_into_some(c, family, config):
        return False
    if exhaustive:
        return all(maps_into_some(w.structure, family, config)
                   for w in enumerate_proper_weak_substructures(c, bound=64))
    for x in range(c.size):
        if not maps_into_some(induced_substructure(c, [z for z in range(c.size) if z != x]), family, config):
            return False
    for rel, t in c.all_tuples():
        if not maps_into_some(remove_tuple(c, rel, t), family, config):
            return False
    return True


def find_critical_obstructions(family: Sequence[RelStructure], max_size: int = 5, critical_only: bool = False,
                               config: SearchConfig = DEFAULT, bound: int = 1 << 22) -> list[ObstructionRecord]:
    """Obstructions of size ``<= max_size`` up to isomorphism, flagged critical or not."""
    if not family:
        raise ValueError("empty family")
    sig = family[0].signature
    out = []
    for s in enumerate_structures(sig, max_size, bound=bound):
        if maps_into_some(s, family, config):
            continue
        crit = is_critical(s, family, config)
        if critical_only and not crit:
            continue
        out.append(ObstructionRecord(s, crit, diameter(s)))
    return out


def anti_identity_of_obstruction(c: RelStructure) -> Sentence:
    """Universally quantified negated diagram of ``c``: true in B iff c does not map to B.

    A structure with no tuples yields ``~(x0 = x0)`` as its single disjunct,
    which is false on every nonempty structure.
    """
    if c.size == 0:
        raise ValueError("the empty structure maps everywhere; it has no anti-identity")
    names = [f"x{i}" for i in range(c.size)]
    lits = [Not(Atom(rel, tuple(names[v] for v in t))) for rel, t in c.all_tuples()]
    if not lits:
        lits = [Not(Eq(names[0], names[0]))]
    matrix = lits[0] if len(lits) == 1 else Or(tuple(lits))
    return Sentence(tuple(("forall", v) for v in names), matrix, c.signature,
                    name=f"anti[{c.name}]" if c.name else "")


@dataclass(frozen=True)
class CoherenceReport:
    obstructions: tuple[ObstructionRecord, ...]
    checked: int
    disagreements: tuple[RelStructure, ...]

    @property
    def passed(self) -> bool:
        return not self.disagreements


def anti_identity_coherence(family: Sequence[RelStructure], size: int,
                            config: SearchConfig = DEFAULT) -> CoherenceReport:
    """Compare the generated anti-identities with the solver on every structure of size ``<= size``."""
    from .logic import conjunction_holds

    crit = tuple(find_critical_obstructions(family, size, critical_only=True, config=config))
    sentences = [anti_identity_of_obstruction(r.structure) for r in crit]
    bad = []
    count = 0
    for b in enumerate_structures(family[0].signature, size):
        count += 1
        if conjunction_holds(b, sentences) != maps_into_some(b, family, config):
            bad.append(b)
    return CoherenceReport(crit, count, tuple(bad))


class PreconditionError(ValueError):
    pass


def kappa_map(c: RelStructure, x: int, n: int) -> list[int]:
    """Position of each element of ``c`` in the n-link, measured from ``x``."""
    d = distances_from(c, x)
    out = []
    for z in range(c.size):
        if z == x:
            out.append(0)
        elif d[z] <= n + 1:
            out.append(int(d[z]) - 1)
        else:
            out.append(n)
    return out


def _as_dict(c: RelStructure, omitted: int, h: Homomorphism | Sequence[int] | Mapping[int, int]) -> dict[int, int]:
    rest = [z for z in range(c.size) if z != omitted]
    if isinstance(h, Homomorphism):
        h = h.map
    if isinstance(h, Mapping):
        if set(h) != set(rest):
            raise PreconditionError(f"map must be defined exactly on the elements other than {omitted}")
        return dict(h)
    if len(h) != len(rest):
        raise PreconditionError(f"map must have {len(rest)} entries")
    return dict(zip(rest, h))


def obstruction_to_pinch_hom(c: RelStructure, x: int, y: int,
                             alpha: Homomorphism | Sequence[int] | Mapping[int, int],
                             beta: Homomorphism | Sequence[int] | Mapping[int, int],
                             template: RelStructure, a0: int = 0) -> Homomorphism:
    """Homomorphism from ``c`` into ``P_n(template)`` where ``n = dist(x, y) - 2``.

    ``alpha`` maps ``c`` minus ``x`` into the template, ``beta`` maps ``c``
    minus ``y``.  Element ``z`` goes to the class of
    ``(kappa(z), beta(z), alpha(z))``; ``x`` and ``y`` sit in the end pinches
    and take ``a0`` in the coordinate their class ignores.  ``alpha`` must
    supply the coordinate read at the right pinch (where ``x`` is far away)
    and ``beta`` the one read at the left pinch.
    """
    d = distances_from(c, x)[y]
    if d == INF or d < 3:
        raise PreconditionError(f"dist(x, y) = {d}; need a finite distance of at least 3")
    n = int(d) - 2
    if not 0 <= a0 < template.size:
        raise PreconditionError(f"a0 = {a0} is not an element of the template")
    alpha_d = _as_dict(c, x, alpha)
    beta_d = _as_dict(c, y, beta)
    cx = induced_substructure(c, [z for z in range(c.size) if z != x])
    cy = induced_substructure(c, [z for z in range(c.size) if z != y])
    if not is_homomorphism([alpha_d[z] for z in range(c.size) if z != x], cx, template):
        raise PreconditionError("alpha is not a homomorphism from C minus x")
    if not is_homomorphism([beta_d[z] for z in range(c.size) if z != y], cy, template):
        raise PreconditionError("beta is not a homomorphism from C minus y")
    pinch = n_pinch(template, n)
    kappa = kappa_map(c, x, n)
    mapping = []
    for z in range(c.size):
        if z == x:
            triple = (kappa[z], beta_d[z], a0)
        elif z == y:
            triple = (kappa[z], a0, alpha_d[z])
        else:
            triple = (kappa[z], beta_d[z], alpha_d[z])
        mapping.append(pinch.element(*triple))
    return Homomorphism(c, pinch.underlying, mapping)
