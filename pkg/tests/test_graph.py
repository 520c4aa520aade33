import networkx as nx
import pytest
from hypothesis import given, settings
from strategies import networks

from tfpvkit import build_matrices, load_fixture, structure, subnetwork
from tfpvkit.exactlin import rank
from tfpvkit.graph import digraph, support_subnetwork


def nx_graph(net):
    G = nx.DiGraph()
    G.add_nodes_from(range(net.d))
    G.add_edges_from((r.source, r.target) for r in net.reactions)
    return G


@settings(max_examples=150, deadline=None)
@given(networks(max_complexes=7, max_reactions=10))
def test_components_and_sccs_match_networkx(net):
    g = digraph(net)
    G = nx_graph(net)
    assert {frozenset(c) for c in g.components} == {frozenset(c) for c in nx.weakly_connected_components(G)}
    assert {frozenset(s) for s in g.sccs} == {frozenset(s) for s in nx.strongly_connected_components(G)}
    C = nx.condensation(G)
    terminal = {frozenset(C.nodes[v]["members"]) for v in C if C.out_degree(v) == 0}
    assert {frozenset(s) for s in g.terminal_sccs} == terminal
    # ordering contract: by smallest member
    assert [s[0] for s in g.sccs] == sorted(s[0] for s in g.sccs)


@settings(max_examples=100, deadline=None)
@given(networks())
def test_deficiency_formula(net):
    s = structure(net)
    assert s.deficiency == net.d - s.rank_N - s.components
    assert s.deficiency >= 0
    assert s.codimension == net.n - s.rank_N
    assert s.weakly_reversible == (s.terminal_sccs == s.components == len(digraph(net).sccs))


@pytest.mark.parametrize(
    "name, expected",
    [
        ("mm_rev", dict(d=3, components=1, codimension=2, deficiency=0, weakly_reversible=True)),
        ("compinh", dict(d=5, components=2, codimension=3, deficiency=0, weakly_reversible=True)),
        ("futile", dict(codimension=3, deficiency=1, weakly_reversible=False)),
        ("lin3", dict(terminal_sccs=1, codimension=1)),
        ("net1", dict(terminal_sccs=2)),
    ],
)
def test_structure_of_fixtures(name, expected):
    s = structure(load_fixture(name)).to_dict()
    assert {k: s[k] for k in expected} == expected


def test_isolated_complexes_count_as_components():
    net = load_fixture("mm_rev")
    sub = subnetwork(net, ["k2", "km2"])
    s = structure(sub)
    assert s.components == 2
    assert s.terminal_sccs == 2
    assert s.weakly_reversible


def test_support_subnetwork():
    net = load_fixture("mm_rev")
    sub = support_subnetwork(net, [1, 1, 0, 0])
    assert sub.labels == ("k1", "km1")
    assert rank(build_matrices(sub).N) == 1
