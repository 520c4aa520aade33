"""Reaction network model, network matrices and the mass-action vector field.

All structural quantities are exact: rates and concentrations are
:class:`fractions.Fraction` and matrices are :class:`RationalMatrix`.
Complexes and reactions keep their input order everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from .errors import DuplicateLabel, DuplicateReaction, InvalidNetwork, SelfLoop, UnboundRate
from .exactlin import RationalMatrix
from .poly import Poly, var_key

Complex = Tuple[int, ...]


@dataclass(frozen=True)
class Reaction:
    source: int
    target: int
    label: str


@dataclass(frozen=True)
class ReactionNetwork:
    """A mass-action network: species, complexes and labelled reactions.

    ``integrals`` optionally names linear conserved quantities
    (``name -> coefficient vector``); they are used to parametrise
    stoichiometric compatibility classes.
    """

    species: Tuple[str, ...]
    complexes: Tuple[Complex, ...]
    reactions: Tuple[Reaction, ...]
    rate_values: Mapping[str, Fraction] = field(default_factory=dict)
    integrals: Tuple[Tuple[str, Tuple[int, ...]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "complexes", tuple(tuple(int(a) for a in c) for c in self.complexes))
        object.__setattr__(self, "reactions", tuple(Reaction(*r) if not isinstance(r, Reaction) else r for r in self.reactions))
        object.__setattr__(self, "rate_values", {k: Fraction(v) for k, v in dict(self.rate_values).items()})
        object.__setattr__(self, "integrals", tuple((name, tuple(int(a) for a in vec)) for name, vec in self.integrals))
        self._validate()

    def _validate(self):
        n = len(self.species)
        if len(set(self.species)) != n:
            raise InvalidNetwork("species names must be distinct")
        for c in self.complexes:
            if len(c) != n:
                raise InvalidNetwork(f"complex {c} has {len(c)} entries, expected {n}")
            if any(a < 0 for a in c):
                raise InvalidNetwork(f"complex {c} has a negative coefficient")
        if len(set(self.complexes)) != len(self.complexes):
            raise InvalidNetwork("complexes must be pairwise distinct")
        for i, name in enumerate(self.species):
            if not any(c[i] > 0 for c in self.complexes):
                raise InvalidNetwork(f"species {name} does not appear in any complex")
        seen_pairs = set()
        seen_labels = set()
        d = len(self.complexes)
        for r in self.reactions:
            if not (0 <= r.source < d and 0 <= r.target < d):
                raise InvalidNetwork(f"reaction {r.label} refers to a missing complex")
            if r.source == r.target:
                raise SelfLoop(f"reaction {r.label} is a self-loop on {self.complex_str(r.source)}")
            if (r.source, r.target) in seen_pairs:
                raise DuplicateReaction(
                    f"duplicate reaction {self.complex_str(r.source)} -> {self.complex_str(r.target)}"
                )
            if r.label in seen_labels:
                raise DuplicateLabel(f"rate label {r.label} used twice")
            seen_pairs.add((r.source, r.target))
            seen_labels.add(r.label)
        clash = seen_labels & set(self.species)
        if clash:
            raise InvalidNetwork(f"names used both as species and rate labels: {sorted(clash)}")
        for label, v in self.rate_values.items():
            if label not in seen_labels:
                raise UnboundRate(f"value given for unknown rate label {label}")
            if v < 0:
                raise InvalidNetwork(f"rate {label} is negative")
        for name, vec in self.integrals:
            if len(vec) != n:
                raise InvalidNetwork(f"integral {name} has {len(vec)} coefficients, expected {n}")

    # sizes ------------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def m(self) -> int:
        return len(self.reactions)

    @property
    def d(self) -> int:
        return len(self.complexes)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(r.label for r in self.reactions)

    # lookups ----------------------------------------------------------------
    def complex_str(self, j: int) -> str:
        c = self.complexes[j]
        parts = [(name if a == 1 else f"{a}{name}") for name, a in zip(self.species, c) if a]
        return " + ".join(parts) if parts else "0"

    def reaction_str(self, i: int) -> str:
        r = self.reactions[i]
        return f"{self.complex_str(r.source)} -> {self.complex_str(r.target)}"

    def reaction_index(self, label: str) -> int:
        for i, r in enumerate(self.reactions):
            if r.label == label:
                return i
        raise KeyError(f"unknown rate label {label!r}")

    def species_index(self, token: str) -> int:
        """Resolve a species by name, case-insensitive name, or ``x<k>`` (1-based)."""
        if token in self.species:
            return self.species.index(token)
        low = [s.lower() for s in self.species]
        if token.lower() in low and low.count(token.lower()) == 1:
            return low.index(token.lower())
        if token[:1] in "xX" and token[1:].isdigit():
            k = int(token[1:])
            if 1 <= k <= self.n:
                return k - 1
        raise KeyError(f"unknown species {token!r}")

    def is_first_order(self) -> bool:
        return all(sum(c) <= 1 for c in self.complexes)

    def has_inflow(self) -> bool:
        return any(not any(self.complexes[r.source]) for r in self.reactions)

    def with_rates(self, values: Mapping[str, Fraction]) -> "ReactionNetwork":
        merged = dict(self.rate_values)
        merged.update({k: Fraction(v) for k, v in values.items()})
        return ReactionNetwork(self.species, self.complexes, self.reactions, merged, self.integrals)


@dataclass(frozen=True)
class NetworkMatrices:
    Y: RationalMatrix
    B: RationalMatrix
    N: RationalMatrix
    reactant_flags: Tuple[bool, ...]

    @property
    def d_star(self) -> int:
        return sum(self.reactant_flags)

    @property
    def Y_star(self) -> RationalMatrix:
        cols = [j for j, f in enumerate(self.reactant_flags) if f]
        return self.Y.submatrix(range(self.Y.nrows), cols)


def build_matrices(net: ReactionNetwork) -> NetworkMatrices:
    n = net.n
    Y = RationalMatrix.from_columns(net.complexes, n)
    Bcols = [net.complexes[r.source] for r in net.reactions]
    Ncols = [tuple(p - q for p, q in zip(net.complexes[r.target], net.complexes[r.source])) for r in net.reactions]
    flags = [False] * net.d
    for r in net.reactions:
        flags[r.source] = True
    return NetworkMatrices(
        Y=Y,
        B=RationalMatrix.from_columns(Bcols, n),
        N=RationalMatrix.from_columns(Ncols, n),
        reactant_flags=tuple(flags),
    )


RateLike = Union[None, Mapping[str, object], Sequence]


def rate_vector(net: ReactionNetwork, k: RateLike = None) -> Tuple[Fraction, ...]:
    """Resolve a rate assignment to a vector ordered like ``net.reactions``.

    ``k`` may be a full sequence, a label mapping (merged over the file's
    bindings), or ``None`` to use the bindings alone.
    """
    if k is not None and not isinstance(k, Mapping):
        vals = tuple(Fraction(v) for v in k)
        if len(vals) != net.m:
            raise ValueError(f"expected {net.m} rate values, got {len(vals)}")
    else:
        merged = dict(net.rate_values)
        if k is not None:
            for label, v in k.items():
                net.reaction_index(label)
                merged[label] = Fraction(v)
        missing = [lab for lab in net.labels if lab not in merged]
        if missing:
            raise UnboundRate(f"no value bound for rate(s) {', '.join(missing)}")
        vals = tuple(merged[lab] for lab in net.labels)
    if any(v < 0 for v in vals):
        raise ValueError("rate values must be nonnegative")
    return vals


def laplacian(net: ReactionNetwork, k: RateLike = None) -> RationalMatrix:
    kv = rate_vector(net, k)
    d = net.d
    A = [[Fraction(0)] * d for _ in range(d)]
    for r, kj in zip(net.reactions, kv):
        A[r.target][r.source] += kj
        A[r.source][r.source] -= kj
    return RationalMatrix(A, ncols=d)


def monomials(exponents: Sequence[int], x: Sequence[Fraction]) -> Fraction:
    value = Fraction(1)
    for e, xi in zip(exponents, x):
        if e:
            value *= xi**e
    return value


def _check_state(net: ReactionNetwork, x) -> Tuple[Fraction, ...]:
    xs = tuple(Fraction(v) for v in x)
    if len(xs) != net.n:
        raise ValueError(f"expected {net.n} concentrations, got {len(xs)}")
    if any(v < 0 for v in xs):
        raise ValueError("concentrations must be nonnegative")
    return xs


def reaction_rates(net: ReactionNetwork, k: RateLike, x) -> Tuple[Fraction, ...]:
    kv = rate_vector(net, k)
    xs = _check_state(net, x)
    return tuple(kj * monomials(net.complexes[r.source], xs) for r, kj in zip(net.reactions, kv))


def rhs_eval(net: ReactionNetwork, k: RateLike, x) -> Tuple[Fraction, ...]:
    """``N diag(k) x^B`` at a nonnegative rational state."""
    v = reaction_rates(net, k, x)
    out = [Fraction(0)] * net.n
    for r, vj in zip(net.reactions, v):
        if not vj:
            continue
        src, tgt = net.complexes[r.source], net.complexes[r.target]
        for i in range(net.n):
            delta = tgt[i] - src[i]
            if delta:
                out[i] += delta * vj
    return tuple(out)


def rhs_eval_laplacian(net: ReactionNetwork, k: RateLike, x) -> Tuple[Fraction, ...]:
    """The same vector field assembled as ``Y A(k) x^Y``."""
    xs = _check_state(net, x)
    A = laplacian(net, k)
    Y = build_matrices(net).Y
    xY = [monomials(c, xs) for c in net.complexes]
    return Y @ (A @ xY)


def jacobian_eval(net: ReactionNetwork, k: RateLike, x) -> RationalMatrix:
    kv = rate_vector(net, k)
    xs = _check_state(net, x)
    n = net.n
    J = [[Fraction(0)] * n for _ in range(n)]
    for r, kj in zip(net.reactions, kv):
        if not kj:
            continue
        src, tgt = net.complexes[r.source], net.complexes[r.target]
        for ell in range(n):
            b = src[ell]
            if not b:
                continue
            lowered = list(src)
            lowered[ell] -= 1
            dv = kj * b * monomials(lowered, xs)
            if not dv:
                continue
            for i in range(n):
                delta = tgt[i] - src[i]
                if delta:
                    J[i][ell] += delta * dv
    return RationalMatrix(J, ncols=n)


# symbolic forms ---------------------------------------------------------------


def rate_polys(net: ReactionNetwork, k: Optional[Mapping[str, object]] = None) -> List[Poly]:
    """Rate constants as polynomials: symbols unless a value is supplied."""
    k = k or {}
    return [Poly.lift(k[lab]) if lab in k else Poly.var(lab) for lab in net.labels]


def monomial_poly(exponents: Sequence[int], names: Sequence[str]) -> Poly:
    mono = tuple((v, e) for v, e in zip(names, exponents) if e)
    return Poly({tuple(sorted(mono, key=lambda t: var_key(t[0]))): 1})


def rhs_polys(net: ReactionNetwork, k: Optional[Mapping[str, object]] = None, names: Optional[Sequence[str]] = None) -> List[Poly]:
    """The vector field as exact polynomials in the species (and rate) symbols."""
    names = list(names or net.species)
    kp = rate_polys(net, k)
    out = [Poly() for _ in range(net.n)]
    for r, kj in zip(net.reactions, kp):
        if kj.is_zero():
            continue
        src, tgt = net.complexes[r.source], net.complexes[r.target]
        flux = kj * monomial_poly(src, names)
        for i in range(net.n):
            delta = tgt[i] - src[i]
            if delta:
                out[i] = out[i] + flux * delta
    return out


def jacobian_polys(net: ReactionNetwork, k=None, names=None) -> List[List[Poly]]:
    names = list(names or net.species)
    f = rhs_polys(net, k, names)
    return [[fi.diff(v) for v in names] for fi in f]
