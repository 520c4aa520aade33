"""Digraph structure of a network: linkage classes, SCCs, deficiency.

Complexes are the nodes. Isolated complexes (e.g. after switching reactions
off) count as their own connected component and as their own terminal
strongly connected component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from .core import ReactionNetwork, build_matrices
from .exactlin import rank


@dataclass(frozen=True)
class Digraph:
    """Connectivity data for the complex graph."""

    components: Tuple[Tuple[int, ...], ...]
    sccs: Tuple[Tuple[int, ...], ...]
    terminal: Tuple[bool, ...]  # parallel to ``sccs``
    component_of: Tuple[int, ...]  # complex -> component index
    scc_of: Tuple[int, ...]  # complex -> scc index

    @property
    def terminal_sccs(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(s for s, t in zip(self.sccs, self.terminal) if t)

    @property
    def weakly_reversible(self) -> bool:
        return len(self.sccs) == len(self.components)


def _union_find_components(d: int, edges: Iterable[Tuple[int, int]]) -> List[List[int]]:
    parent = list(range(d))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for v in range(d):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def _tarjan(d: int, succ: Sequence[Sequence[int]]) -> List[List[int]]:
    """Iterative Tarjan; returns SCCs (each sorted), ordered by smallest member."""
    index = [-1] * d
    low = [0] * d
    on_stack = [False] * d
    stack: List[int] = []
    out: List[List[int]] = []
    counter = 0
    for root in range(d):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return sorted(out, key=lambda c: c[0])


def digraph(net: ReactionNetwork) -> Digraph:
    d = net.d
    edges = [(r.source, r.target) for r in net.reactions]
    succ: List[List[int]] = [[] for _ in range(d)]
    for a, b in edges:
        succ[a].append(b)
    comps = _union_find_components(d, edges)
    sccs = _tarjan(d, succ)
    scc_of = [0] * d
    for k, s in enumerate(sccs):
        for v in s:
            scc_of[v] = k
    comp_of = [0] * d
    for k, c in enumerate(comps):
        for v in c:
            comp_of[v] = k
    terminal = [all(scc_of[b] == scc_of[a] for a, b in edges if scc_of[a] == k) for k in range(len(sccs))]
    return Digraph(
        components=tuple(tuple(c) for c in comps),
        sccs=tuple(tuple(s) for s in sccs),
        terminal=tuple(terminal),
        component_of=tuple(comp_of),
        scc_of=tuple(scc_of),
    )


@dataclass(frozen=True)
class StructureSummary:
    n: int
    m: int
    d: int
    d_star: int
    components: int
    terminal_sccs: int
    weakly_reversible: bool
    rank_N: int
    codimension: int
    deficiency: int
    one_terminal_per_component: bool
    zero_complex_present: bool
    zero_in_terminal: bool

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "d_star": self.d_star,
            "components": self.components,
            "terminal_sccs": self.terminal_sccs,
            "weakly_reversible": self.weakly_reversible,
            "rank_N": self.rank_N,
            "codimension": self.codimension,
            "deficiency": self.deficiency,
            "one_terminal_per_component": self.one_terminal_per_component,
            "zero_complex_present": self.zero_complex_present,
            "zero_in_terminal": self.zero_in_terminal,
        }


def zero_complex_index(net: ReactionNetwork):
    for j, c in enumerate(net.complexes):
        if not any(c):
            return j
    return None


def structure(net: ReactionNetwork) -> StructureSummary:
    g = digraph(net)
    mats = build_matrices(net)
    rk = rank(mats.N)
    per_comp = [0] * len(g.components)
    for s in g.terminal_sccs:
        per_comp[g.component_of[s[0]]] += 1
    z = zero_complex_index(net)
    return StructureSummary(
        n=net.n,
        m=net.m,
        d=net.d,
        d_star=mats.d_star,
        components=len(g.components),
        terminal_sccs=len(g.terminal_sccs),
        weakly_reversible=g.weakly_reversible,
        rank_N=rk,
        codimension=net.n - rk,
        deficiency=net.d - rk - len(g.components),
        one_terminal_per_component=all(c == 1 for c in per_comp),
        zero_complex_present=z is not None,
        zero_in_terminal=z is not None and g.terminal[g.scc_of[z]],
    )


def subnetwork(net: ReactionNetwork, off: Iterable = ()) -> ReactionNetwork:
    """Drop the reactions in ``off`` (indices or labels); keep every complex and species."""
    idx = {lab: i for i, lab in enumerate(net.labels)}
    dropped = {idx[x] if isinstance(x, str) else int(x) for x in off}
    reactions = [r for i, r in enumerate(net.reactions) if i not in dropped]
    rates = {lab: v for lab, v in net.rate_values.items() if idx[lab] not in dropped}
    return ReactionNetwork(net.species, net.complexes, tuple(reactions), rates, net.integrals)


def support_subnetwork(net: ReactionNetwork, k_hat: Sequence) -> ReactionNetwork:
    """The subnetwork of reactions with nonzero entry in the rate vector ``k_hat``."""
    if len(k_hat) != net.m:
        raise ValueError(f"expected {net.m} rate values, got {len(k_hat)}")
    return subnetwork(net, [i for i, v in enumerate(k_hat) if not v])
