"""LTC species sets, their links to first integrals, and slow-fast scalings.

A species set is LTC when setting those concentrations to zero annihilates
the whole vector field; for mass action this happens exactly when every
reactant complex contains one of the species. Scaling an LTC set by a small
parameter ``eps`` (and optionally switching some reactions to order ``eps``)
produces a slow-fast system. Inside this module ``eps`` is a formal
polynomial variable named ``eps``; it is never a float.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import ReactionNetwork, build_matrices, rhs_polys
from .errors import BadSupport, NotLtc
from .exactlin import RationalMatrix, extreme_rays, kernel_basis, left_kernel_basis, primitive
from .graph import digraph, subnetwork
from .poly import Poly

EPS = "eps"
SCALED_SUFFIX = "_s"
DEFAULT_COEFFICIENT_BOUND = 3

INFLOW_WARNING = (
    "network has an inflow reaction: the vector field contains a non-zero constant monomial, so no LTC species set exists"
)


def scaled_name(name: str) -> str:
    return f"{name}{SCALED_SUFFIX}"


# --------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class LtcSet:
    indices: Tuple[int, ...]
    species: Tuple[str, ...]
    minimal: bool
    witness: Tuple[int, ...]

    def to_dict(self):
        return {
            "indices": list(self.indices),
            "species": list(self.species),
            "minimal": self.minimal,
            "witness": list(self.witness),
        }


def reactant_supports(net: ReactionNetwork) -> List[frozenset]:
    flags = build_matrices(net).reactant_flags
    return [frozenset(i for i, a in enumerate(c) if a) for c, f in zip(net.complexes, flags) if f]


def is_ltc(net: ReactionNetwork, indices: Iterable[int]) -> bool:
    """Every reactant complex contains a species of the set (and the set is proper)."""
    chosen = set(indices)
    if not chosen or len(chosen) >= net.n:
        return False
    return all(sup & chosen for sup in reactant_supports(net))


def _minimal_hitting_sets(supports: Sequence[frozenset], limit: int) -> List[frozenset]:
    """All inclusion-minimal hitting sets of size <= ``limit`` (branch and bound)."""
    found: List[frozenset] = []
    order = sorted(set(supports), key=lambda s: (len(s), sorted(s)))

    def branch(chosen: frozenset):
        if len(chosen) > limit or any(f <= chosen for f in found):
            return
        miss = next((s for s in order if not (s & chosen)), None)
        if miss is None:
            found.append(chosen)
            return
        for i in sorted(miss):
            branch(chosen | {i})

    branch(frozenset())
    minimal = [s for s in set(found) if not any(o < s for o in found)]
    return minimal


def enumerate_ltc(net: ReactionNetwork, all_sets: bool = False, max_size: Optional[int] = None) -> List[LtcSet]:
    """LTC species sets, sorted by ``(size, indices)``.

    By default only the inclusion-minimal sets are returned. With
    ``all_sets`` every LTC set up to ``max_size`` species (default ``n - 1``)
    is listed and marked minimal or not.
    """
    if net.has_inflow():
        warnings.warn(INFLOW_WARNING, stacklevel=2)
        return []
    limit = net.n - 1 if max_size is None else min(max_size, net.n - 1)
    supports = reactant_supports(net)
    if not supports:
        return []
    minimal = _minimal_hitting_sets(supports, limit)
    if all_sets:
        sets = [
            frozenset(c)
            for size in range(1, limit + 1)
            for c in itertools.combinations(range(net.n), size)
            if all(s & set(c) for s in supports)
        ]
    else:
        sets = minimal
    out = []
    for s in sets:
        idx = tuple(sorted(s))
        out.append(
            LtcSet(
                indices=idx,
                species=tuple(net.species[i] for i in idx),
                minimal=s in minimal,
                witness=tuple(int(i in s) for i in range(net.n)),
            )
        )
    out.sort(key=lambda l: (len(l.indices), l.indices))
    return out


# --------------------------------------------------------------------------
# first integrals


@dataclass(frozen=True)
class FirstIntegralLink:
    alpha: Tuple[int, ...]
    support: Tuple[int, ...]
    levels: Tuple[int, ...]  # value of alpha . Y on each connected component
    ltc: bool
    applicable: bool
    note: str

    def to_dict(self):
        return {
            "alpha": list(self.alpha),
            "support": list(self.support),
            "levels": list(self.levels),
            "ltc": self.ltc,
            "applicable": self.applicable,
            "note": self.note,
        }


def link_for(net: ReactionNetwork, alpha: Sequence[int]) -> FirstIntegralLink:
    """Decompose ``alpha . Y`` over connected components and read off the LTC implication."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != net.n:
        raise ValueError(f"expected {net.n} coefficients")
    N = build_matrices(net).N
    if any(v != 0 for v in N.T @ alpha):
        raise ValueError("alpha is not a first integral: alpha . N != 0")
    g = digraph(net)
    values = [sum(a * c for a, c in zip(alpha, cplx)) for cplx in net.complexes]
    levels = tuple(values[comp[0]] for comp in g.components)
    per_comp = [0] * len(g.components)
    for s in g.terminal_sccs:
        per_comp[g.component_of[s[0]]] += 1
    applicable = all(c == 1 for c in per_comp) and all(a >= 0 for a in alpha)
    support = tuple(i for i, a in enumerate(alpha) if a)
    ltc = applicable and all(l > 0 for l in levels) and 0 < len(support) < net.n
    if not applicable:
        note = "decomposition needs one terminal component per linkage class and nonnegative coefficients"
    elif ltc:
        note = "support is an LTC species set"
    elif len(support) >= net.n:
        note = "support contains every species"
    else:
        note = "some linkage class has level zero: no implication"
    return FirstIntegralLink(alpha, support, levels, ltc, applicable, note)


def nonnegative_integrals(net: ReactionNetwork, bound: int = DEFAULT_COEFFICIENT_BOUND) -> List[Tuple[int, ...]]:
    """Primitive nonnegative integer first integrals with coefficients ``<= bound``.

    A vector of the left kernel is fixed by its entries at the pivot columns
    of the reduced row echelon basis, so those entries are enumerated.
    """
    basis = left_kernel_basis(build_matrices(net).N)
    if not basis:
        return []
    R, pivots = _rref(basis)
    found = set()
    for values in itertools.product(range(bound + 1), repeat=len(pivots)):
        if not any(values):
            continue
        vec = [sum((v * R[k][j] for k, v in enumerate(values)), Fraction(0)) for j in range(net.n)]
        if any(x.denominator != 1 or x < 0 or x > bound for x in vec):
            continue
        ints = tuple(int(x) for x in vec)
        g = 0
        for x in ints:
            g = gcd(g, x)
        if g == 1:
            found.add(ints)
    return sorted(found, key=lambda a: (sum(1 for x in a if x), tuple(-x for x in a)))


def _rref(rows) -> Tuple[List[List[Fraction]], List[int]]:
    A = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def first_integral_links(net: ReactionNetwork, bound: int = DEFAULT_COEFFICIENT_BOUND) -> List[FirstIntegralLink]:
    return [link_for(net, a) for a in nonnegative_integrals(net, bound)]


@dataclass(frozen=True)
class HullCheck:
    """Experimental: does an LTC set carry a first integral supported inside it?"""

    applicable: bool
    exists: bool
    alpha: Optional[Tuple[int, ...]]

    def to_dict(self):
        return {
            "experimental": True,
            "applicable": self.applicable,
            "exists": self.exists,
            "alpha": None if self.alpha is None else list(self.alpha),
        }


def integral_in_ltc_hull(net: ReactionNetwork, indices: Sequence[int]) -> HullCheck:
    """For one linkage class with one terminal component: look for ``w >= 0`` with
    ``sum_i w_i ybar_i`` a positive multiple of the all-ones vector, where
    ``ybar_i`` are the rows of the complex matrix for the chosen species.
    """
    g = digraph(net)
    applicable = len(g.components) == 1 and len(g.terminal_sccs) == 1
    idx = list(indices)
    # Columns: w_i for i in idx, then c; rows: one equation per complex.
    rows = [[net.complexes[j][i] for i in idx] + [-1] for j in range(net.d)]
    rays = extreme_rays(RationalMatrix(rows))
    for ray in rays:
        if ray[-1] > 0 and any(ray[:-1]):
            alpha = [0] * net.n
            for i, w in zip(idx, ray[:-1]):
                alpha[i] = w
            return HullCheck(applicable, True, tuple(primitive(alpha)))
    return HullCheck(applicable, False, None)


# --------------------------------------------------------------------------
# slow-fast systems


@dataclass(frozen=True)
class SlowFastSystem:
    """Scaled system: ``x_i = eps * x_i_s`` for fast species, ``k_j = eps * k_j_s`` for slow reactions.

    ``fast_rhs[i]`` is the right-hand side of ``d x_i_s / dt`` (already
    divided by ``eps``); ``slow_rhs[i]`` is the right-hand side of
    ``d x_i / dt`` for the remaining species, still containing ``eps``.
    """

    species: Tuple[str, ...]
    fast: Tuple[int, ...]
    slow: Tuple[int, ...]
    scaled_reactions: Tuple[int, ...]
    scaled_labels: Tuple[str, ...]
    fast_rhs: Tuple[Poly, ...]
    slow_rhs: Tuple[Poly, ...]
    fast_integrals: Tuple[Tuple[str, Poly], ...]

    @property
    def fast_vars(self) -> Tuple[str, ...]:
        return tuple(scaled_name(self.species[i]) for i in self.fast)

    @property
    def slow_vars(self) -> Tuple[str, ...]:
        return tuple(self.species[i] for i in self.slow)

    def grading(self, poly: Poly) -> Dict[int, Poly]:
        return poly.grade(EPS)

    def leading_fast(self) -> Tuple[Poly, ...]:
        """The fast equations at ``eps = 0``."""
        return tuple(p.subs({EPS: 0}) for p in self.fast_rhs)

    def evaluate(self, x: Sequence, k: Sequence, eps) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        """Evaluate both blocks at original-coordinate state ``x`` and rates ``k``.

        Scaled coordinates are recovered as ``x_i / eps`` and ``k_j / eps``.
        """
        eps = Fraction(eps)
        values: Dict[str, Fraction] = {EPS: eps}
        for i, name in enumerate(self.species):
            if i in self.fast:
                values[scaled_name(name)] = Fraction(x[i]) / eps
            else:
                values[name] = Fraction(x[i])
        scaled = set(self.scaled_labels)
        for lab, kv in zip(self._labels, k):
            if lab in scaled:
                values[scaled_name(lab)] = Fraction(kv) / eps
            else:
                values[lab] = Fraction(kv)
        fast = tuple(p.evaluate(values) for p in self.fast_rhs)
        slow = tuple(p.evaluate(values) for p in self.slow_rhs)
        return fast, slow

    # filled in by the constructors; kept out of equality
    _labels: Tuple[str, ...] = ()

    def listing(self) -> str:
        lines = []
        for name, p in zip(self.fast_vars, self.fast_rhs):
            lines.append(f"d{name}/dt = {_graded_text(p)}")
        for name, p in zip(self.slow_vars, self.slow_rhs):
            lines.append(f"d{name}/dt = {_graded_text(p)}")
        for name, p in self.fast_integrals:
            lines.append(f"fast first integral {name}: {p}")
        return "\n".join(lines)

    def to_dict(self):
        return {
            "fast_species": [self.species[i] for i in self.fast],
            "slow_species": list(self.slow_vars),
            "fast_vars": list(self.fast_vars),
            "scaled_reactions": list(self.scaled_labels),
            "fast_rhs": {v: _graded_dict(p) for v, p in zip(self.fast_vars, self.fast_rhs)},
            "slow_rhs": {v: _graded_dict(p) for v, p in zip(self.slow_vars, self.slow_rhs)},
            "fast_integrals": {name: str(p) for name, p in self.fast_integrals},
            "listing": self.listing().splitlines(),
        }


def _graded_dict(p: Poly) -> Dict[str, str]:
    return {str(e): str(c) for e, c in p.grade(EPS).items()}


def _graded_text(p: Poly) -> str:
    parts = []
    for e, c in p.grade(EPS).items():
        body = str(c)
        if e == 0:
            parts.append(body)
        else:
            factor = EPS if e == 1 else f"{EPS}^{e}"
            parts.append(f"{factor}*({body})")
    return " + ".join(parts) if parts else "0"


def _resolve_species(net: ReactionNetwork, species) -> Tuple[int, ...]:
    if isinstance(species, LtcSet):
        return species.indices
    out = []
    for s in species:
        out.append(net.species_index(s) if isinstance(s, str) else int(s))
    return tuple(sorted(set(out)))


def _resolve_reactions(net: ReactionNetwork, off) -> Tuple[int, ...]:
    out = []
    for x in off:
        if isinstance(x, str):
            try:
                out.append(net.reaction_index(x))
            except KeyError:
                raise BadSupport(f"unknown rate label {x!r}") from None
        else:
            if not 0 <= int(x) < net.m:
                raise BadSupport(f"reaction index {x} out of range")
            out.append(int(x))
    return tuple(sorted(set(out)))


def _build(net: ReactionNetwork, fast: Tuple[int, ...], off: Tuple[int, ...]) -> SlowFastSystem:
    eps = Poly.var(EPS)
    labels = net.labels
    k = {labels[j]: eps * Poly.var(scaled_name(labels[j])) for j in off}
    f = rhs_polys(net, k)
    subs = {net.species[i]: eps * Poly.var(scaled_name(net.species[i])) for i in fast}
    g = [p.subs(subs) for p in f]
    fast_rhs = []
    for i in fast:
        try:
            fast_rhs.append(g[i].divide_by_var(EPS))
        except ValueError:
            raise NotLtc(f"the equation of {net.species[i]} has a term of order eps^0 after scaling") from None
    slow = tuple(i for i in range(net.n) if i not in fast)
    slow_rhs = tuple(g[i] for i in slow)
    # Linear first integrals supported on the fast species survive as phi / eps.
    N = build_matrices(net).N
    fast_integrals = []
    named = [(name, vec) for name, vec in net.integrals if all(vec[i] == 0 for i in slow)]
    if named:
        candidates = named
    else:
        rows = N.submatrix(list(fast), range(net.m))
        candidates = []
        for t, w in enumerate(kernel_basis(rows.T), start=1):
            vec = [0] * net.n
            for i, a in zip(fast, primitive(w)):
                vec[i] = a
            candidates.append((f"phi{t}", tuple(vec)))
    for name, vec in candidates:
        p = Poly()
        for i in fast:
            if vec[i]:
                p = p + Poly.var(scaled_name(net.species[i])) * vec[i]
        fast_integrals.append((name, p))
    return SlowFastSystem(
        species=net.species,
        fast=fast,
        slow=slow,
        scaled_reactions=off,
        scaled_labels=tuple(labels[j] for j in off),
        fast_rhs=tuple(fast_rhs),
        slow_rhs=slow_rhs,
        fast_integrals=tuple(fast_integrals),
        _labels=labels,
    )


def scale(net: ReactionNetwork, species) -> SlowFastSystem:
    """Scale an LTC species set: ``x_i = eps * x_i_s``."""
    fast = _resolve_species(net, species)
    if not is_ltc(net, fast):
        raise NotLtc(f"{{{', '.join(net.species[i] for i in fast)}}} is not an LTC species set")
    return _build(net, fast, ())


def partial_scale(net: ReactionNetwork, off, species) -> SlowFastSystem:
    """Scale a species set that is LTC once the reactions ``off`` are switched off;
    those reactions re-enter at order ``eps`` (``k_j = eps * k_j_s``).
    """
    off_idx = _resolve_reactions(net, off)
    if len(off_idx) >= net.m:
        raise BadSupport("cannot switch off every reaction")
    fast = _resolve_species(net, species)
    sub = subnetwork(net, off_idx)
    if not is_ltc(sub, fast):
        raise NotLtc(
            f"{{{', '.join(net.species[i] for i in fast)}}} is not an LTC species set once "
            f"{', '.join(net.labels[j] for j in off_idx)} are switched off"
        )
    return _build(net, fast, off_idx)
