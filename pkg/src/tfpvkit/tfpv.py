"""Tikhonov-Fenichel parameter values (TFPVs) obtained by switching reactions off.

Structural enumeration covers two situations:

* the network is weakly reversible with deficiency zero: switching off a set
  of reactions is a TFPV whenever the remaining subnetwork is weakly
  reversible with more connected components (``DeficiencyZeroWR``);
* otherwise the remaining subnetwork must be weakly reversible with
  codimension ``s* < s < n`` and admit complex-balanced equilibria
  (``ComplexBalancedWR``); this is decided exactly by :func:`cb_check`.

First-order networks are handled by :func:`first_order_tfpv`. Any proposed
parameter value can be checked at a stationary point with
:func:`verify_tfpv_at_point`.
"""

from __future__ import annotations

import itertools
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple

from .core import ReactionNetwork, build_matrices, jacobian_eval, jacobian_polys, laplacian, rate_vector, rhs_eval
from .errors import DegenerateConstantTerm, NotFirstOrder, NotWeaklyReversible, SizeLimit
from .exactlin import (
    CharPoly,
    HurwitzResult,
    Minor,
    RationalMatrix,
    char_poly,
    det,
    extreme_rays,
    hurwitz_stable,
    independent_rows,
    kernel_basis,
    minor_polynomials,
    primitive,
    rank,
)
from .graph import Digraph, StructureSummary, digraph, structure, subnetwork, zero_complex_index

MAX_ENUMERATION_REACTIONS = 20
MAX_INJECTIVITY_SPECIES = 6

DEFICIENCY_ZERO_WR = "DeficiencyZeroWR"
COMPLEX_BALANCED_WR = "ComplexBalancedWR"
FIRST_ORDER_TERMINAL = "FirstOrderTerminal"
POINT_VERIFIED = "PointVerified"


# --------------------------------------------------------------------------
# point verification


@dataclass(frozen=True)
class PointVerification:
    """Per-condition verdicts for a parameter value at one point."""

    s: int
    codimension: int
    stationary: bool
    jacobian_rank: int
    rank_ok: bool
    split_ok: bool
    dimension_ok: bool
    charpoly: CharPoly
    divided_charpoly: Optional[CharPoly]
    hurwitz: Optional[HurwitzResult]
    notes: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return (
            self.stationary
            and self.rank_ok
            and self.split_ok
            and self.dimension_ok
            and self.hurwitz is not None
            and self.hurwitz.stable
        )

    @property
    def conditions_passed(self) -> bool:
        """All point-wise conditions hold, ignoring the range of ``s``."""
        return self.stationary and self.rank_ok and self.split_ok and self.hurwitz is not None and self.hurwitz.stable

    def to_dict(self):
        return {
            "s": self.s,
            "codimension": self.codimension,
            "stationary": self.stationary,
            "jacobian_rank": self.jacobian_rank,
            "rank_ok": self.rank_ok,
            "split_ok": self.split_ok,
            "dimension_ok": self.dimension_ok,
            "charpoly": str(self.charpoly),
            "divided_charpoly": None if self.divided_charpoly is None else str(self.divided_charpoly),
            "hurwitz_stable": None if self.hurwitz is None else self.hurwitz.stable,
            "hurwitz_determinants": None if self.hurwitz is None else list(self.hurwitz.determinants),
            "passed": self.passed,
            "notes": list(self.notes),
        }


def verify_tfpv_at_point(net: ReactionNetwork, k_hat, x0, s: int) -> PointVerification:
    """Check the point-wise TFPV conditions for ``k_hat`` at ``x0`` in dimension ``s``.

    * ``x0`` is stationary: the vector field vanishes exactly;
    * the Jacobian ``J`` has rank ``n - s`` and ``rank(J^2) = rank(J)``
      (kernel and image are complementary);
    * the characteristic polynomial divided by ``t^s`` is Hurwitz stable;
    * ``s* < s < n`` for the codimension ``s*`` of the network.
    """
    kv = rate_vector(net, k_hat)
    x = tuple(Fraction(v) for v in x0)
    n = net.n
    notes: List[str] = []
    s_star = structure(net).codimension
    stationary = all(v == 0 for v in rhs_eval(net, kv, x))
    if not stationary:
        notes.append("x0 is not a stationary point")
    J = jacobian_eval(net, kv, x)
    rk = rank(J)
    rank_ok = rk == n - s
    if not rank_ok:
        notes.append(f"Jacobian rank is {rk}, expected {n - s}")
    split_ok = rank(J @ J) == rk
    if not split_ok:
        notes.append("kernel and image of the Jacobian are not complementary")
    dimension_ok = s_star < s < n
    if not dimension_ok:
        notes.append(f"not a TFPV dimension (s must satisfy {s_star} < s < {n})")
    chi = char_poly(J)
    divided = None
    hurwitz = None
    if 0 <= s <= n and chi.trailing_zeros() >= s:
        divided = chi.divide_tau(s)
        try:
            hurwitz = hurwitz_stable(divided)
        except DegenerateConstantTerm:
            notes.append("eigenvalue-on-axis: inconclusive")
        else:
            if not hurwitz.stable:
                notes.append("nonzero eigenvalues are not all in the open left half-plane")
    else:
        notes.append(f"t^{s} does not divide the characteristic polynomial")
    return PointVerification(
        s=s,
        codimension=s_star,
        stationary=stationary,
        jacobian_rank=rk,
        rank_ok=rank_ok,
        split_ok=split_ok,
        dimension_ok=dimension_ok,
        charpoly=chi,
        divided_charpoly=divided,
        hurwitz=hurwitz,
        notes=tuple(notes),
    )


# --------------------------------------------------------------------------
# complex balancing


def tree_constants(A: RationalMatrix, nodes: Sequence[int]) -> Dict[int, Fraction]:
    """Positive kernel vector of the Laplacian restricted to a closed strongly connected set.

    Entry ``i`` is ``(-1)^(k-1)`` times the principal minor of ``A[nodes, nodes]``
    with node ``i`` removed (matrix-tree theorem).
    """
    nodes = list(nodes)
    k = len(nodes)
    out = {}
    for i in nodes:
        rest = [j for j in nodes if j != i]
        minor = det(A.submatrix(rest, rest))
        out[i] = minor if (k - 1) % 2 == 0 else -minor
    return out


@dataclass(frozen=True)
class CbResult:
    balanced: bool
    psi: Tuple[Fraction, ...]
    relations: Tuple[Tuple[int, ...], ...]
    failing: Optional[Tuple[int, ...]] = None

    def __bool__(self):
        return self.balanced

    def to_dict(self):
        return {
            "balanced": self.balanced,
            "psi": list(self.psi),
            "relations": [list(w) for w in self.relations],
            "failing_relation": None if self.failing is None else list(self.failing),
        }


def toric_relations(net: ReactionNetwork, g: Optional[Digraph] = None) -> List[Tuple[int, ...]]:
    """Integer basis of ``{w : w^T [Y^T | component indicators] = 0}``."""
    g = g or digraph(net)
    cols = []
    for i in range(net.n):
        cols.append([c[i] for c in net.complexes])
    for comp in g.components:
        members = set(comp)
        cols.append([int(j in members) for j in range(net.d)])
    M = RationalMatrix(cols)  # (n + r) x d, i.e. the transpose of the exponent matrix
    return [primitive(w) for w in kernel_basis(M)]


def cb_check(net: ReactionNetwork, k=None) -> CbResult:
    """Exact test for positive complex-balanced equilibria of a weakly reversible network.

    With ``psi`` the tree-constant kernel vector of ``A(k)``, complex-balanced
    equilibria exist iff ``prod_j psi_j^{w_j} == 1`` for every integer
    relation ``w`` among the complexes and component indicators.
    """
    g = digraph(net)
    if not g.weakly_reversible:
        raise NotWeaklyReversible("complex balancing requires a weakly reversible network")
    kv = rate_vector(net, k)
    if any(v <= 0 for v in kv):
        raise ValueError("complex balancing is checked at positive rate values")
    A = laplacian(net, kv)
    psi = [Fraction(0)] * net.d
    for comp in g.sccs:
        for i, v in tree_constants(A, comp).items():
            psi[i] = v
    relations = toric_relations(net, g)
    for w in relations:
        value = prod((psi[j] ** e for j, e in enumerate(w) if e), start=Fraction(1))
        if value != 1:
            return CbResult(False, tuple(psi), tuple(relations), w)
    return CbResult(True, tuple(psi), tuple(relations))


# --------------------------------------------------------------------------
# structural enumeration


@dataclass(frozen=True)
class TfpvCertificate:
    off_set: Tuple[int, ...]
    labels: Tuple[str, ...]
    dimension: int
    justification: str
    subnetwork: StructureSummary
    complex_balanced: Optional[bool] = None
    verification: Optional[PointVerification] = None
    witness_rates: Optional[Tuple[Fraction, ...]] = None
    witness_point: Optional[Tuple[Fraction, ...]] = None

    def to_dict(self):
        return {
            "off_set": list(self.off_set),
            "off_labels": list(self.labels),
            "dimension": self.dimension,
            "justification": self.justification,
            "subnetwork": self.subnetwork.to_dict(),
            "complex_balanced": self.complex_balanced,
            "witness_rates": None if self.witness_rates is None else list(self.witness_rates),
            "witness_point": None if self.witness_point is None else list(self.witness_point),
            "verification": None if self.verification is None else self.verification.to_dict(),
        }


def _partition(g: Digraph) -> Tuple[Tuple[int, ...], ...]:
    return g.components


def _cycle_circulation(net: ReactionNetwork) -> Tuple[int, ...]:
    """Positive integer rates making every complex balanced at ``x = 1``.

    Each reaction ``u -> v`` of a weakly reversible network lies on a cycle
    (closed by a shortest path ``v ~> u``); summing cycle indicators gives a
    positive circulation, i.e. ``A(k) 1 = 0``.
    """
    succ: Dict[int, List[Tuple[int, int]]] = {}
    for idx, r in enumerate(net.reactions):
        succ.setdefault(r.source, []).append((r.target, idx))
    flow = [0] * net.m
    for idx, r in enumerate(net.reactions):
        prev: Dict[int, Tuple[int, int]] = {r.target: (-1, -1)}
        queue = deque([r.target])
        while queue and r.source not in prev:
            u = queue.popleft()
            for v, e in succ.get(u, []):
                if v not in prev:
                    prev[v] = (u, e)
                    queue.append(v)
        if r.source not in prev:
            raise NotWeaklyReversible(f"reaction {r.label} lies on no cycle")
        flow[idx] += 1
        node = r.source
        while node != r.target:
            u, e = prev[node]
            flow[e] += 1
            node = u
    return tuple(flow)


def _expand(net: ReactionNetwork, off: Sequence[int], values: Sequence) -> Tuple[Fraction, ...]:
    """Spread subnetwork rate values back onto the full reaction list."""
    out = [Fraction(0)] * net.m
    kept = [i for i in range(net.m) if i not in set(off)]
    for i, v in zip(kept, values):
        out[i] = Fraction(v)
    return tuple(out)


def structural_witness(net: ReactionNetwork, off: Sequence[int]):
    """A rate vector supported off ``off`` and a positive stationary point ``x = 1``."""
    sub = subnetwork(net, off)
    k_hat = _expand(net, off, _cycle_circulation(sub))
    return k_hat, tuple(Fraction(1) for _ in range(net.n))


def enumerate_structural_tfpv(
    net: ReactionNetwork,
    max_off: Optional[int] = None,
    verify: bool = True,
) -> List[TfpvCertificate]:
    """Switch-off sets giving TFPVs with a critical manifold meeting the positive orthant.

    Returns certificates sorted by ``(dimension, off_set)``; an empty list
    means nothing was found within ``max_off`` (default ``m - 1``).
    """
    m = net.m
    if m > MAX_ENUMERATION_REACTIONS:
        raise SizeLimit(f"subset enumeration limited to {MAX_ENUMERATION_REACTIONS} reactions, got {m}")
    if max_off is None:
        max_off = m - 1
    max_off = max(0, min(max_off, m))
    base = structure(net)
    thm39 = base.weakly_reversible and base.deficiency == 0
    if not thm39:
        warnings.warn(
            "network is not weakly reversible with deficiency zero; "
            "candidates are screened by the exact complex-balancing check",
            stacklevel=2,
        )
    n, d = net.n, net.d
    candidates = []
    for size in range(1, max_off + 1):
        for off in itertools.combinations(range(m), size):
            sub = subnetwork(net, off)
            g = digraph(sub)
            if not g.weakly_reversible:
                continue
            summary = structure(sub)
            if thm39:
                r_sub = summary.components
                s = n - d + r_sub
                if not (r_sub > base.components and s < n):
                    continue
                justification, cb = DEFICIENCY_ZERO_WR, True
            else:
                s = summary.codimension
                if not (base.codimension < s < n):
                    continue
                justification = COMPLEX_BALANCED_WR
                if summary.deficiency == 0:
                    cb = True
                else:
                    kept = [lab for i, lab in enumerate(net.labels) if i not in off]
                    if all(lab in sub.rate_values for lab in kept) and all(sub.rate_values[lab] > 0 for lab in kept):
                        cb = cb_check(sub).balanced
                    else:
                        cb = None
                    if cb is False:
                        continue
            candidates.append((off, s, justification, summary, cb, _partition(g)))
    # Minimality: drop an off-set that strictly contains another with the same component partition.
    kept_candidates = []
    for off, s, just, summary, cb, part in candidates:
        so = set(off)
        if any(set(o2) < so and p2 == part for o2, _, _, _, _, p2 in candidates):
            continue
        kept_candidates.append((off, s, just, summary, cb))
    certs = []
    for off, s, just, summary, cb in kept_candidates:
        verification = k_hat = x0 = None
        if verify and cb is True and summary.deficiency == 0:
            k_hat, x0 = structural_witness(net, off)
            verification = verify_tfpv_at_point(net, k_hat, x0, s)
        certs.append(
            TfpvCertificate(
                off_set=tuple(off),
                labels=tuple(net.labels[i] for i in off),
                dimension=s,
                justification=just,
                subnetwork=summary,
                complex_balanced=cb,
                verification=verification,
                witness_rates=k_hat,
                witness_point=x0,
            )
        )
    certs.sort(key=lambda c: (c.dimension, c.off_set))
    return certs


# --------------------------------------------------------------------------
# first-order networks


def _first_order_point(sub: ReactionNetwork, g: Digraph) -> Tuple[Fraction, ...]:
    """Stationary point of a first-order network with unit rates on its reactions."""
    A = laplacian(sub, [1] * sub.m)
    v = [Fraction(0)] * sub.d
    z = zero_complex_index(sub)
    for comp in g.terminal_sccs:
        psi = tree_constants(A, comp)
        scale = 1 / psi[z] if z in psi else 1
        for i, val in psi.items():
            v[i] = val * scale
    x = []
    for i in range(sub.n):
        j = next(j for j, c in enumerate(sub.complexes) if c[i] == 1)
        x.append(v[j])
    return tuple(x)


def first_order_tfpv(net: ReactionNetwork, verify: bool = True) -> List[TfpvCertificate]:
    """Minimal switch-off sets of a first-order network that raise the number of terminal SCCs.

    If the zero complex is present it must lie in a terminal SCC of the
    subnetwork. The dimension is the number of terminal SCCs, minus one when
    the zero complex is present; it must satisfy ``s* < s < n``.
    """
    if not net.is_first_order():
        raise NotFirstOrder("every complex must have total stoichiometry at most one")
    m = net.m
    if m > MAX_ENUMERATION_REACTIONS:
        raise SizeLimit(f"subset enumeration limited to {MAX_ENUMERATION_REACTIONS} reactions, got {m}")
    base = structure(net)
    z = zero_complex_index(net)
    found = []
    for size in range(1, m + 1):
        for off in itertools.combinations(range(m), size):
            sub = subnetwork(net, off)
            g = digraph(sub)
            T_sub = len(g.terminal_sccs)
            if T_sub <= base.terminal_sccs:
                continue
            if z is not None and not g.terminal[g.scc_of[z]]:
                continue
            s = T_sub - 1 if z is not None else T_sub
            if not (base.codimension < s < net.n):
                continue
            found.append((off, s, sub, g))
    certs = []
    for off, s, sub, g in found:
        if any(s2 == s and set(o2) < set(off) for o2, s2, _, _ in found):
            continue
        verification = k_hat = x0 = None
        if verify:
            k_hat = tuple(Fraction(0) if i in off else Fraction(1) for i in range(m))
            x0 = _first_order_point(sub, g)
            verification = verify_tfpv_at_point(net, k_hat, x0, s)
        certs.append(
            TfpvCertificate(
                off_set=tuple(off),
                labels=tuple(net.labels[i] for i in off),
                dimension=s,
                justification=FIRST_ORDER_TERMINAL,
                subnetwork=structure(sub),
                complex_balanced=None,
                verification=verification,
                witness_rates=k_hat,
                witness_point=x0,
            )
        )
    certs.sort(key=lambda c: (c.dimension, c.off_set))
    return certs


# --------------------------------------------------------------------------
# prechecks excluding positive TFPVs

EXCLUDED_BY_MINORS = "ExcludedByMinors"
EXCLUDED_BY_INJECTIVITY = "ExcludedByInjectivity"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PrecheckResult:
    verdict: str
    rays: Tuple[Tuple[int, ...], ...]
    covering_patterns: Tuple[Tuple[int, ...], ...]
    witness: Optional[Minor]
    minors: Tuple[Minor, ...]
    injectivity_coefficient: Optional[object]
    notes: Tuple[str, ...] = ()

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "rays": [list(r) for r in self.rays],
            "covering_ray_sets": [list(p) for p in self.covering_patterns],
            "witness_minor": None if self.witness is None else _minor_dict(self.witness),
            "sign_definite_minors": [_minor_dict(mi) for mi in self.minors if mi.sign_definite or mi.flux_sign_definite],
            "injectivity_coefficient": None if self.injectivity_coefficient is None else str(self.injectivity_coefficient),
            "notes": list(self.notes),
        }


def _minor_dict(mi: Minor):
    return {
        "columns": list(mi.columns),
        "polynomial": str(mi.polynomial),
        "flux_polynomial": None if mi.flux_polynomial is None else str(mi.flux_polynomial),
    }


def _minimal_covers(rays: Sequence[Tuple[int, ...]], m: int) -> List[Tuple[int, ...]]:
    """Inclusion-minimal sets of rays whose supports cover all reactions."""
    supports = [frozenset(i for i in range(m) if r[i]) for r in rays]
    full = frozenset(range(m))
    covers: List[Tuple[int, ...]] = []
    for size in range(1, len(rays) + 1):
        for combo in itertools.combinations(range(len(rays)), size):
            if any(set(c) <= set(combo) for c in covers):
                continue
            if frozenset().union(*(supports[i] for i in combo)) == full:
                covers.append(combo)
    return covers


def _nonzero_on_pattern(minor: Minor, pattern: Sequence[int]) -> bool:
    """Whether a sign-definite minor keeps a term when only ``pattern`` rays are active."""
    allowed = {f"lam{i + 1}" for i in pattern}
    return any(all(v in allowed for v, _ in mono) for mono in minor.polynomial.terms)


def no_positive_tfpv_precheck(net: ReactionNetwork) -> PrecheckResult:
    """Sufficient tests that no positive rate vector is a TFPV.

    Minor test: with ``E`` the extreme rays of the flux cone and ``N'`` a row
    basis of ``N``, every ``lambda >= 0`` with ``E lambda > 0`` activates a
    set of rays covering all reactions. If for each minimal covering set some
    maximal minor of ``N' diag(E lambda) B^T`` has coefficients of one sign
    and a term in the active rays only, the Jacobian has full rank at every
    positive stationary point.

    Injectivity test (``n <= 6``): the coefficient of ``t^{s*}`` of the
    symbolic characteristic polynomial has only positive coefficients.
    """
    mats = build_matrices(net)
    N = mats.N
    notes: List[str] = []
    rays = extreme_rays(N)
    covers = _minimal_covers(rays, net.m) if rays else []
    minors: List[Minor] = []
    witness = None
    if not rays:
        notes.append("flux cone is trivial: no positive stationary fluxes")
    elif not covers:
        notes.append("no strictly positive flux vector exists")
    else:
        rows = independent_rows(N)
        Np = N.submatrix(rows, range(N.ncols))
        minors = minor_polynomials(Np, rays, mats.B)
        # A minor settles every admissible lambda at once if it is sign-definite in
        # the flux coordinates, or sign-definite in lambda with a surviving term
        # for every minimal covering set of rays.
        full = [
            mi
            for mi in minors
            if mi.flux_sign_definite or (mi.sign_definite and all(_nonzero_on_pattern(mi, p) for p in covers))
        ]
        if full:
            full.sort(key=lambda mi: (not mi.is_flux_monomial, not mi.is_monomial, mi.columns))
            witness = full[0]
        else:
            definite = [mi for mi in minors if mi.sign_definite]
            if definite and all(any(_nonzero_on_pattern(mi, p) for mi in definite) for p in covers):
                witness = definite[0]
                notes.append("different minors are needed for different covering ray sets")
    if witness is not None:
        return PrecheckResult(EXCLUDED_BY_MINORS, tuple(rays), tuple(covers), witness, tuple(minors), None, tuple(notes))

    coefficient = None
    if net.n > MAX_INJECTIVITY_SPECIES:
        notes.append(f"injectivity test skipped: limited to {MAX_INJECTIVITY_SPECIES} species")
    else:
        s_star = net.n - rank(N)
        k = net.n - s_star
        if k > 0:
            coefficient = char_poly(jacobian_polys(net)).coefficients[k - 1]
            coeffs = coefficient.coefficients() if hasattr(coefficient, "coefficients") else [coefficient]
            if coeffs and all(c > 0 for c in coeffs):
                return PrecheckResult(
                    EXCLUDED_BY_INJECTIVITY, tuple(rays), tuple(covers), None, tuple(minors), coefficient, tuple(notes)
                )
    return PrecheckResult(INCONCLUSIVE, tuple(rays), tuple(covers), None, tuple(minors), coefficient, tuple(notes))
