"""Restriction to a stoichiometric compatibility class and the near-TFPV test.

Fixing the values ``theta`` of a basis of linear first integrals lets us
solve for ``s*`` of the species affinely and study the remaining
``n - s*`` retained coordinates. Along the class the characteristic
polynomial of the restricted Jacobian decides whether a parameter point is
a TFPV for dimension one (explicit conditions for 2, 3 and 4 retained
coordinates).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import ReactionNetwork, build_matrices, rate_vector, rhs_polys
from .errors import InvalidNetwork, SingularSelection
from .exactlin import (
    CharPoly,
    RationalMatrix,
    char_poly,
    det,
    extreme_rays,
    hurwitz_determinants,
    inverse,
    left_kernel_basis,
    primitive,
    rank,
)
from .poly import Poly

TFPV_DIMENSION_ONE = "TFPV for dimension one"
NOT_CRITICAL = "not on critical set"
NOT_STATIONARY = "not stationary"
CONDITIONS_NOT_MET = "conditions not met"
PHI_UNAVAILABLE = "Φ-check unavailable"

Integrals = Sequence[Tuple[str, Sequence]]


@dataclass(frozen=True)
class SccRestriction:
    species: Tuple[str, ...]
    retained: Tuple[int, ...]
    eliminated: Tuple[int, ...]
    integrals: Tuple[Tuple[str, Tuple[int, ...]], ...]
    substitution: Tuple[Tuple[str, Poly], ...]  # eliminated species -> affine form
    rhs: Tuple[Poly, ...]  # restricted vector field, one entry per retained species
    rate_labels: Tuple[str, ...]

    @property
    def retained_names(self) -> Tuple[str, ...]:
        return tuple(self.species[i] for i in self.retained)

    @property
    def theta_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.integrals)

    @property
    def dimension(self) -> int:
        return len(self.retained)

    def jacobian(self) -> List[List[Poly]]:
        return [[h.diff(v) for v in self.retained_names] for h in self.rhs]

    def symbolic_charpoly(self) -> CharPoly:
        return char_poly(self.jacobian())

    def values(self, x_hat, k=None, theta=None, net: Optional[ReactionNetwork] = None) -> Dict[str, Fraction]:
        """Variable assignment for the retained coordinates, rates and levels."""
        vals: Dict[str, Fraction] = {}
        if isinstance(x_hat, Mapping):
            for name in self.retained_names:
                vals[name] = Fraction(x_hat[name])
        else:
            if len(x_hat) != self.dimension:
                raise ValueError(f"expected {self.dimension} retained values, got {len(x_hat)}")
            for name, v in zip(self.retained_names, x_hat):
                vals[name] = Fraction(v)
        if k is not None:
            kv = rate_vector(net, k) if net is not None else tuple(Fraction(x) for x in k)
            vals.update(zip(self.rate_labels, kv))
        theta = theta or {}
        if not isinstance(theta, Mapping):
            theta = dict(zip(self.theta_names, theta))
        for name in self.theta_names:
            if name in theta:
                vals[name] = Fraction(theta[name])
        return vals

    def full_state(self, vals: Mapping[str, Fraction]) -> Tuple[Fraction, ...]:
        """The point of the full space that corresponds to an assignment."""
        lookup = dict(self.substitution)
        out = []
        for i, name in enumerate(self.species):
            out.append(lookup[name].evaluate(vals) if name in lookup else Fraction(vals[name]))
        return tuple(out)

    def to_dict(self):
        return {
            "retained": list(self.retained_names),
            "eliminated": {name: str(p) for name, p in self.substitution},
            "integrals": {name: list(vec) for name, vec in self.integrals},
            "rhs": {name: str(p) for name, p in zip(self.retained_names, self.rhs)},
        }


def default_integrals(net: ReactionNetwork) -> List[Tuple[str, Tuple[int, ...]]]:
    if net.integrals:
        return [(name, tuple(int(v) for v in vec)) for name, vec in net.integrals]
    basis = left_kernel_basis(build_matrices(net).N)
    return [(f"phi{t}", primitive(v)) for t, v in enumerate(basis, start=1)]


def _check_basis(net: ReactionNetwork, integrals: Integrals):
    N = build_matrices(net).N
    s_star = net.n - rank(N)
    for name, vec in integrals:
        if len(vec) != net.n or any(x != 0 for x in N.T @ tuple(vec)):
            raise InvalidNetwork(f"{name} is not a first integral")
    if len(integrals) != s_star or rank(RationalMatrix([list(v) for _, v in integrals])) != s_star:
        raise InvalidNetwork(f"need {s_star} independent first integrals, got {len(integrals)}")


def _selection(integrals: Integrals, eliminated: Sequence[int]) -> RationalMatrix:
    return RationalMatrix([[vec[i] for i in eliminated] for _, vec in integrals], ncols=len(eliminated))


def default_retained(net: ReactionNetwork, integrals: Optional[Integrals] = None) -> Tuple[int, ...]:
    """Lexicographically first retained set whose complement can be solved for."""
    integrals = list(integrals or default_integrals(net))
    s_star = len(integrals)
    for retained in itertools.combinations(range(net.n), net.n - s_star):
        elim = [i for i in range(net.n) if i not in retained]
        if not elim or det(_selection(integrals, elim)) != 0:
            return retained
    raise SingularSelection("no valid choice of retained species")


def restrict_to_scc(net: ReactionNetwork, integrals: Optional[Integrals] = None, retained=None) -> SccRestriction:
    integrals = [(name, tuple(vec)) for name, vec in (integrals or default_integrals(net))]
    _check_basis(net, integrals)
    if retained is None:
        ret = default_retained(net, integrals)
    else:
        ret = tuple(sorted({net.species_index(r) if isinstance(r, str) else int(r) for r in retained}))
    if len(ret) != net.n - len(integrals):
        raise SingularSelection(f"retain exactly {net.n - len(integrals)} species, got {len(ret)}")
    elim = tuple(i for i in range(net.n) if i not in ret)
    subs: Dict[str, Poly] = {}
    if elim:
        S = _selection(integrals, elim)
        if det(S) == 0:
            names = ", ".join(net.species[i] for i in ret)
            raise SingularSelection(f"the first integrals cannot be solved for the complement of ({names})")
        Sinv = inverse(S)
        # phi_t(x) = theta_t  =>  S x_E = theta - R x_R
        rest = []
        for name, vec in integrals:
            p = Poly.var(name)
            for i in ret:
                if vec[i]:
                    p = p - Poly.var(net.species[i]) * vec[i]
            rest.append(p)
        for a, i in enumerate(elim):
            p = Poly()
            for t in range(len(integrals)):
                if Sinv[a, t]:
                    p = p + rest[t] * Sinv[a, t]
            subs[net.species[i]] = p
    f = rhs_polys(net)
    rhs = tuple(f[i].subs(subs) for i in ret)
    return SccRestriction(
        species=net.species,
        retained=ret,
        eliminated=elim,
        integrals=tuple(integrals),
        substitution=tuple((net.species[i], subs[net.species[i]]) for i in elim),
        rhs=rhs,
        rate_labels=net.labels,
    )


def scc_charpoly(restriction: SccRestriction, x_hat, k, theta, net: Optional[ReactionNetwork] = None) -> CharPoly:
    vals = restriction.values(x_hat, k, theta, net)
    J = [[e.evaluate(vals) for e in row] for row in restriction.jacobian()]
    return char_poly(J)


def is_compact(net: ReactionNetwork) -> bool:
    """Whether some first integral has all coefficients positive."""
    N = build_matrices(net).N
    rays = extreme_rays(N.T)
    covered = set()
    for r in rays:
        covered.update(i for i, v in enumerate(r) if v)
    return len(covered) == net.n


@dataclass(frozen=True)
class NearTfpvResult:
    verdict: str
    dimension: int
    sigma: Tuple[Fraction, ...]
    stationary: bool
    jacobian_rank: int
    multiplicity_one: bool
    hurwitz: Tuple[Fraction, ...]
    hurwitz_zero: Tuple[int, ...]
    compact: bool
    notes: Tuple[str, ...] = field(default=())

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "dimension": self.dimension,
            "sigma": list(self.sigma),
            "stationary": self.stationary,
            "jacobian_rank": self.jacobian_rank,
            "multiplicity_one": self.multiplicity_one,
            "hurwitz": list(self.hurwitz),
            "hurwitz_zero": list(self.hurwitz_zero),
            "compact": self.compact,
            "notes": list(self.notes),
        }


def _dimension_rule(sigma: Sequence[Fraction]) -> Optional[bool]:
    k = len(sigma)
    if k == 2:
        return sigma[1] == 0 and sigma[0] != 0
    if k == 3:
        return sigma[2] == 0 and sigma[0] != 0 and sigma[1] != 0
    if k == 4:
        return sigma[3] == 0 and sigma[2] != 0 and sigma[0] * sigma[1] != sigma[2]
    return None


def near_tfpv_check(
    restriction: SccRestriction, x_hat, k, theta, net: Optional[ReactionNetwork] = None
) -> NearTfpvResult:
    vals = restriction.values(x_hat, k, theta, net)
    J = RationalMatrix([[e.evaluate(vals) for e in row] for row in restriction.jacobian()], ncols=restriction.dimension)
    sigma = char_poly(J).coefficients
    dim = len(sigma)
    stationary = all(h.evaluate(vals) == 0 for h in restriction.rhs)
    notes = []
    if any(v < 0 for v in restriction.full_state(vals)):
        notes.append("corresponding full-space point leaves the nonnegative orthant")
    multiplicity_one = dim >= 2 and sigma[-1] == 0 and sigma[-2] != 0
    divided = CharPoly(tuple(sigma)).divide_tau(CharPoly(tuple(sigma)).trailing_zeros())
    hurwitz = hurwitz_determinants(divided.coefficients) if divided.degree else ()
    compact = is_compact(net) if net is not None else _compact_from_integrals(restriction)
    rule = _dimension_rule(sigma)
    if not stationary:
        verdict = NOT_STATIONARY
    elif dim and sigma[-1] != 0:
        verdict = NOT_CRITICAL
    elif rule is None:
        verdict = PHI_UNAVAILABLE
    else:
        verdict = TFPV_DIMENSION_ONE if rule else CONDITIONS_NOT_MET
    if any(h < 0 for h in hurwitz):
        notes.append("a Hurwitz determinant of the divided polynomial is negative")
    return NearTfpvResult(
        verdict=verdict,
        dimension=dim,
        sigma=tuple(sigma),
        stationary=stationary,
        jacobian_rank=rank(J),
        multiplicity_one=multiplicity_one,
        hurwitz=tuple(hurwitz),
        hurwitz_zero=tuple(i + 1 for i, h in enumerate(hurwitz) if h == 0),
        compact=compact,
        notes=tuple(notes),
    )


def _compact_from_integrals(restriction: SccRestriction) -> bool:
    """Fallback without the network: positive combination of the given integrals only."""
    vecs = [v for _, v in restriction.integrals]
    covered = set()
    for v in vecs:
        if all(x >= 0 for x in v):
            covered.update(i for i, x in enumerate(v) if x)
    return len(covered) == len(restriction.species)
