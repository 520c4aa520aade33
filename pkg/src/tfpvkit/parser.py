"""The ``.crn`` text format and the JSON report format.

One statement per line, ``#`` starts a comment::

    X1 + X2 <-> X3 ; k1, km1      # reversible: forward label first
    X3 -> X4 + X2 ; k2            # irreversible
    0 -> X5 ; kin                 # the zero complex
    k1 = 3/2                      # rate binding (nonnegative rational)
    @species X1 X2 X3 X4 X5       # optional: fix the species order
    @complex 2X1                  # optional: declare a (possibly isolated) complex
    @integral e0 = X2 + X3        # optional: name a conserved linear form

Coefficients may be written ``2X1``, ``2 X1`` or ``2*X1``. Species are
ordered by first appearance unless ``@species`` is given; complexes are
ordered by first appearance.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .core import Reaction, ReactionNetwork, build_matrices
from .errors import (
    CrnSyntaxError,
    DuplicateLabel,
    DuplicateReaction,
    InvalidNetwork,
    SelfLoop,
    UnboundCoefficient,
    UnboundRate,
)
from .exactlin import CharPoly, RationalMatrix
from .poly import Poly

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ZERO = re.compile(r"0(?![0-9A-Za-z_*])(?!\s*[A-Za-z_*])")
_RATIONAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?")


class _Cursor:
    """Character cursor over one line, tracking 1-based columns."""

    def __init__(self, text: str, line: int, offset: int = 0):
        self.text = text
        self.pos = offset
        self.line = line

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            self.fail(f"expected '{s}'")
        self.pos += len(s)

    def match(self, pattern: re.Pattern) -> Optional[str]:
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group(0)

    @property
    def col(self) -> int:
        """Column of the next non-blank character."""
        self.skip_ws()
        return self.pos + 1

    def fail(self, message: str, cls=CrnSyntaxError, col: Optional[int] = None):
        self.skip_ws()
        found = self.text[self.pos : self.pos + 10] or "end of line"
        raise cls(f"{message} (found {found!r})" if cls is CrnSyntaxError else message, self.line, col or self.col)


class _Builder:
    def __init__(self):
        self.species: List[str] = []
        self.species_fixed = False
        self.complexes: List[Dict[str, int]] = []
        self.complex_keys: List[Tuple[Tuple[str, int], ...]] = []
        self.reactions: List[Tuple[int, int, str]] = []
        self.pairs: Dict[Tuple[int, int], int] = {}
        self.labels: Dict[str, int] = {}
        self.bindings: List[Tuple[str, Fraction, int, int]] = []
        self.integrals: List[Tuple[str, Dict[str, int], int, int]] = []

    def add_species(self, name: str, cur: _Cursor, col: int):
        if name in self.species:
            return
        if self.species_fixed:
            cur.fail(f"species {name} not listed in @species", InvalidNetwork, col)
        self.species.append(name)

    def complex_index(self, terms: Dict[str, int]) -> int:
        key = tuple(sorted(terms.items()))
        if key in self.complex_keys:
            return self.complex_keys.index(key)
        self.complex_keys.append(key)
        self.complexes.append(dict(terms))
        return len(self.complexes) - 1


def _parse_complex(cur: _Cursor, b: _Builder, allow_negative: bool = False) -> Dict[str, int]:
    cur.skip_ws()
    start = cur.col
    zero = _ZERO.match(cur.text, cur.pos)
    if zero and not allow_negative:
        cur.pos = zero.end()
        return {}
    terms: Dict[str, int] = {}
    first = True
    while True:
        sign = 1
        if not first or allow_negative:
            if cur.peek("+"):
                cur.expect("+")
            elif cur.peek("-") and (allow_negative or not first):
                if not allow_negative:
                    cur.fail("negative coefficients are not allowed in a complex", UnboundCoefficient)
                cur.expect("-")
                sign = -1
            elif not first:
                break
        first = False
        cur.skip_ws()
        tcol = cur.col
        coeff = cur.match(re.compile(r"\d+"))
        if coeff is not None:
            cur.match(re.compile(r"\*"))
        name = cur.match(_IDENT)
        if name is None:
            if coeff is None and cur.peek("-"):
                cur.fail("negative coefficients are not allowed in a complex", UnboundCoefficient)
            cur.fail("expected a species name")
        c = int(coeff) if coeff is not None else 1
        if c == 0:
            raise UnboundCoefficient(f"coefficient of {name} must be positive", cur.line, tcol)
        b.add_species(name, cur, tcol)
        terms[name] = terms.get(name, 0) + sign * c
        if not cur.peek("+") and not cur.peek("-"):
            break
        if cur.peek("->"):
            break
    if not allow_negative and not terms:
        cur.fail("empty complex", col=start)
    return terms


def parse(text: str) -> ReactionNetwork:
    """Parse ``.crn`` text into a :class:`ReactionNetwork`."""
    b = _Builder()
    saw_statement = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        saw_statement = True
        cur = _Cursor(line, lineno)
        cur.skip_ws()
        if cur.peek("@"):
            _parse_directive(cur, b)
            continue
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=(?!>)", line)
        if m:
            cur.pos = m.end()
            vcol = cur.col
            value = cur.match(_RATIONAL)
            if value is None or not cur.at_end():
                cur.fail("expected a nonnegative rational value")
            v = Fraction(value)
            if v < 0:
                raise InvalidNetwork(f"rate {m.group(1)} must be nonnegative", lineno, vcol)
            b.bindings.append((m.group(1), v, lineno, m.start(1) + 1))
            continue
        _parse_reaction(cur, b)
    if not saw_statement:
        raise CrnSyntaxError("empty network file: no statements", 1, 1)
    return _finish(b)


def _parse_directive(cur: _Cursor, b: _Builder):
    cur.expect("@")
    word = cur.match(_IDENT)
    if word == "species":
        if b.species:
            cur.fail("@species must come before any species is used", InvalidNetwork)
        names = []
        while not cur.at_end():
            col = cur.col
            name = cur.match(_IDENT)
            if name is None:
                cur.fail("expected a species name")
            if name in names:
                cur.fail(f"species {name} listed twice", InvalidNetwork, col)
            names.append(name)
        if not names:
            cur.fail("@species needs at least one name")
        b.species = names
        b.species_fixed = True
    elif word == "complex":
        terms = _parse_complex(cur, b)
        if not cur.at_end():
            cur.fail("unexpected text after complex")
        b.complex_index(terms)
    elif word == "integral":
        col = cur.col
        name = cur.match(_IDENT)
        if name is None:
            cur.fail("expected an integral name")
        cur.expect("=")
        terms = _parse_complex(cur, b, allow_negative=True)
        if not cur.at_end():
            cur.fail("unexpected text after integral")
        b.integrals.append((name, terms, cur.line, col))
    else:
        cur.fail(f"unknown directive @{word}")


def _parse_reaction(cur: _Cursor, b: _Builder):
    lhs = _parse_complex(cur, b)
    acol = cur.col
    if cur.peek("<->"):
        cur.expect("<->")
        reversible = True
    elif cur.peek("->"):
        cur.expect("->")
        reversible = False
    else:
        cur.fail("expected '->' or '<->'")
    rhs = _parse_complex(cur, b)
    cur.expect(";")
    labels = []
    while True:
        col = cur.col
        lab = cur.match(_IDENT)
        if lab is None:
            cur.fail("expected a rate label")
        labels.append((lab, col))
        if cur.peek(","):
            cur.expect(",")
            continue
        break
    if not cur.at_end():
        cur.fail("unexpected text after rate labels")
    if len(labels) != (2 if reversible else 1):
        cur.fail(f"{'reversible' if reversible else 'irreversible'} reaction needs {2 if reversible else 1} rate label(s)", col=labels[0][1])
    i, j = b.complex_index(lhs), b.complex_index(rhs)
    if i == j:
        raise SelfLoop("reaction has identical reactant and product complex", cur.line, acol)
    pairs = [(i, j, labels[0])] + ([(j, i, labels[1])] if reversible else [])
    for src, tgt, (lab, col) in pairs:
        if (src, tgt) in b.pairs:
            raise DuplicateReaction("reaction already declared", cur.line, acol)
        if lab in b.labels:
            raise DuplicateLabel(f"rate label {lab} already used", cur.line, col)
        b.pairs[(src, tgt)] = len(b.reactions)
        b.labels[lab] = len(b.reactions)
        b.reactions.append((src, tgt, lab))


def _finish(b: _Builder) -> ReactionNetwork:
    species = b.species
    complexes = [tuple(c.get(s, 0) for s in species) for c in b.complexes]
    rates = {}
    for lab, v, line, col in b.bindings:
        if lab not in b.labels:
            raise UnboundRate(f"value given for unknown rate label {lab}", line, col)
        if lab in rates:
            raise DuplicateLabel(f"rate {lab} bound twice", line, col)
        rates[lab] = v
    integrals = []
    for name, terms, line, col in b.integrals:
        vec = tuple(terms.get(s, 0) for s in species)
        integrals.append((name, vec))
    net = ReactionNetwork(
        tuple(species),
        tuple(complexes),
        tuple(Reaction(*r) for r in b.reactions),
        rates,
        tuple(integrals),
    )
    N = build_matrices(net).N
    for (name, vec), (_, _, line, col) in zip(integrals, b.integrals):
        if any(x != 0 for x in N.T @ vec):
            raise InvalidNetwork(f"integral {name} is not conserved by the reactions", line, col)
    return net


def parse_file(path) -> ReactionNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# --------------------------------------------------------------------------
# serialization


def _complex_text(net: ReactionNetwork, c: Sequence[int]) -> str:
    parts = [(name if a == 1 else f"{a}{name}") for name, a in zip(net.species, c) if a]
    return " + ".join(parts) if parts else "0"


def _linear_text(species: Sequence[str], vec: Sequence[int]) -> str:
    out = ""
    for name, a in zip(species, vec):
        if not a:
            continue
        body = name if abs(a) == 1 else f"{abs(a)}{name}"
        if not out:
            out = ("-" if a < 0 else "") + body
        else:
            out += (" - " if a < 0 else " + ") + body
    return out or "0"


def serialize(net: ReactionNetwork) -> str:
    """Render a network as ``.crn`` text that parses back to an equal network."""
    lines: List[str] = []
    # Statement grouping: merge a reaction with an immediately following reverse.
    groups = []
    i = 0
    R = net.reactions
    while i < len(R):
        r = R[i]
        if i + 1 < len(R) and R[i + 1].source == r.target and R[i + 1].target == r.source:
            groups.append((r, R[i + 1]))
            i += 2
        else:
            groups.append((r,))
            i += 1
    # Complex order the parser would infer from the reaction lines alone.
    inferred: List[int] = []
    for g in groups:
        for j in (g[0].source, g[0].target):
            if j not in inferred:
                inferred.append(j)
    declare_complexes = inferred != list(range(net.d))
    order = list(range(net.d)) if declare_complexes else inferred
    seen_species: List[str] = []
    for j in order:
        for name, a in zip(net.species, net.complexes[j]):
            if a and name not in seen_species:
                seen_species.append(name)
    if seen_species != list(net.species):
        lines.append("@species " + " ".join(net.species))
    if declare_complexes:
        for j in range(net.d):
            lines.append("@complex " + _complex_text(net, net.complexes[j]))
    for g in groups:
        lhs = _complex_text(net, net.complexes[g[0].source])
        rhs = _complex_text(net, net.complexes[g[0].target])
        if len(g) == 2:
            lines.append(f"{lhs} <-> {rhs} ; {g[0].label}, {g[1].label}")
        else:
            lines.append(f"{lhs} -> {rhs} ; {g[0].label}")
    for lab in net.labels:
        if lab in net.rate_values:
            lines.append(f"{lab} = {net.rate_values[lab]}")
    for name, vec in net.integrals:
        lines.append(f"@integral {name} = {_linear_text(net.species, vec)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# JSON reports


def to_jsonable(obj: Any) -> Any:
    """Convert results to JSON-ready values; rationals become ``"p/q"`` strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (Poly, CharPoly)):
        return str(obj)
    if isinstance(obj, RationalMatrix):
        return [[str(x) for x in row] for row in obj.rows]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def network_dict(net: ReactionNetwork, name: Optional[str] = None) -> Dict[str, Any]:
    out = {
        "species": list(net.species),
        "complexes": [_complex_text(net, c) for c in net.complexes],
        "reactions": [
            {
                "index": i,
                "label": r.label,
                "reactant": _complex_text(net, net.complexes[r.source]),
                "product": _complex_text(net, net.complexes[r.target]),
            }
            for i, r in enumerate(net.reactions)
        ],
        "rate_values": {lab: net.rate_values[lab] for lab in net.labels if lab in net.rate_values},
    }
    if name is not None:
        out["name"] = name
    return out


@dataclass
class Report:
    command: str
    network: Dict[str, Any]
    summary: Dict[str, Any] = field(default_factory=dict)
    certificates: List[Any] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "network": self.network,
            "summary": self.summary,
            "certificates": self.certificates,
            "warnings": list(self.warnings),
        }


def emit_report(report: Report) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
