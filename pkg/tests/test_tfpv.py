import itertools
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tfpvkit import build_matrices, jacobian_eval, laplacian, load_fixture, rhs_eval, structure, subnetwork
from tfpvkit.core import Reaction, ReactionNetwork
from tfpvkit.errors import NotFirstOrder, NotWeaklyReversible, SizeLimit
from tfpvkit.graph import digraph
from tfpvkit.tfpv import (
    COMPLEX_BALANCED_WR,
    DEFICIENCY_ZERO_WR,
    EXCLUDED_BY_INJECTIVITY,
    EXCLUDED_BY_MINORS,
    FIRST_ORDER_TERMINAL,
    INCONCLUSIVE,
    cb_check,
    enumerate_structural_tfpv,
    first_order_tfpv,
    no_positive_tfpv_precheck,
    structural_witness,
    tree_constants,
    verify_tfpv_at_point,
)


def _labels(certs):
    return [(set(c.labels), c.dimension) for c in certs]


def test_mm_rev_pairs():
    certs = enumerate_structural_tfpv(load_fixture("mm_rev"))
    assert _labels(certs) == [({"k1", "km1"}, 3), ({"k2", "km2"}, 3)]
    assert all(c.justification == DEFICIENCY_ZERO_WR and c.verification.passed for c in certs)


def test_compinh_six_certificates():
    certs = enumerate_structural_tfpv(load_fixture("compinh"))
    assert sorted(c.dimension for c in certs) == [4, 4, 4, 5, 5, 5]
    assert {frozenset(c.labels) for c in certs if c.dimension == 4} == {
        frozenset({"k1", "km1"}),
        frozenset({"k2", "km2"}),
        frozenset({"k3", "km3"}),
    }
    assert all(c.verification.passed for c in certs)


def test_futile_needs_exact_balancing():
    with pytest.warns(UserWarning, match="not weakly reversible"):
        certs = enumerate_structural_tfpv(load_fixture("futile"))
    first = certs[0]
    assert set(first.labels) == {"k3", "k6"}
    assert first.dimension == 4
    assert first.justification == COMPLEX_BALANCED_WR
    assert first.complex_balanced is True


def test_max_off_limits_the_search():
    certs = enumerate_structural_tfpv(load_fixture("compinh"), max_off=2)
    assert [c.dimension for c in certs] == [4, 4, 4]


def test_nothing_for_minus():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert enumerate_structural_tfpv(load_fixture("minus")) == []


def test_size_limit():
    species = ("A", "B")
    reactions = []
    complexes = [(i, j) for i in range(5) for j in range(5)]
    for j in range(21):
        reactions.append(Reaction(j, j + 1, f"k{j}"))
    net = ReactionNetwork(species, tuple(complexes), tuple(reactions))
    with pytest.raises(SizeLimit):
        enumerate_structural_tfpv(net)


# --------------------------------------------------------------------------
# numeric oracle for the certificates


def _numeric_check(net, k_hat, x0, s):
    """Eigenvalues by numpy: s (near) zero and the rest in the open left half-plane."""
    J = np.array([[float(v) for v in row] for row in jacobian_eval(net, k_hat, x0).tolist()])
    f = np.array([float(v) for v in rhs_eval(net, k_hat, x0)])
    ev = np.linalg.eigvals(J)
    small = np.abs(ev) < 1e-9
    return bool(np.all(np.abs(f) < 1e-12) and small.sum() == s and np.all(ev[~small].real < 0))


@pytest.mark.parametrize("name", ["mm_rev", "compinh", "futile", "futile_rev", "mm_irrev", "kinase"])
def test_certificates_agree_with_eigenvalues(name):
    net = load_fixture(name)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        certs = enumerate_structural_tfpv(net)
    checked = 0
    for c in certs:
        if c.verification is None:
            continue
        assert c.verification.passed
        assert _numeric_check(net, c.witness_rates, c.witness_point, c.dimension)
        checked += 1
    assert checked


def _brute_force_offsets(net):
    """Off-sets whose subnetwork has a positive stationary point at x = 1 for unit-cycle
    rates and whose Jacobian there passes the eigenvalue test, of any size."""
    found = set()
    s_star = structure(net).codimension
    for size in range(1, net.m):
        for off in itertools.combinations(range(net.m), size):
            sub = subnetwork(net, off)
            if not digraph(sub).weakly_reversible or structure(sub).deficiency != 0:
                continue
            k_hat, x0 = structural_witness(net, off)
            s = structure(sub).codimension
            if s_star < s < net.n and _numeric_check(net, k_hat, x0, s):
                found.add(frozenset(off))
    return found


@pytest.mark.parametrize("name", ["mm_rev", "compinh"])
def test_enumeration_is_the_minimal_part_of_brute_force(name):
    net = load_fixture(name)
    brute = _brute_force_offsets(net)
    certs = {frozenset(c.off_set) for c in enumerate_structural_tfpv(net)}
    assert certs <= brute
    # every brute-force hit contains a certificate with the same dimension or is itself one
    for off in brute:
        assert any(c <= off for c in certs)


@st.composite
def reversible_networks(draw):
    n = draw(st.integers(1, 3))
    species = tuple(f"X{i + 1}" for i in range(n))
    pool = [c for c in itertools.product(range(3), repeat=n)]
    complexes = draw(st.lists(st.sampled_from(pool), min_size=2, max_size=5, unique=True))
    for i in range(n):
        if not any(c[i] for c in complexes):
            unit = tuple(int(j == i) for j in range(n))
            if unit not in complexes:
                complexes.append(unit)
    d = len(complexes)
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=4, unique=True))
    reactions = []
    for a, b in chosen:
        reactions.append(Reaction(a, b, f"k{len(reactions) + 1}"))
        reactions.append(Reaction(b, a, f"k{len(reactions) + 1}"))
    return ReactionNetwork(species, tuple(complexes), tuple(reactions))


@settings(max_examples=40, deadline=None)
@given(reversible_networks())
def test_deficiency_zero_certificates_always_verify(net):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        certs = enumerate_structural_tfpv(net)
    s_star = structure(net).codimension
    for c in certs:
        assert s_star < c.dimension < net.n
        assert digraph(subnetwork(net, c.off_set)).weakly_reversible
        if c.verification is not None:
            assert c.verification.passed
            assert _numeric_check(net, c.witness_rates, c.witness_point, c.dimension)


# --------------------------------------------------------------------------
# complex balancing


def _kinase_sub():
    net = load_fixture("kinase")
    return subnetwork(net, [net.labels.index(x) for x in ("k9", "k10", "k11")])


def test_kinase_relation_both_ways():
    sub = _kinase_sub()
    assert sub.labels == ("k1", "k2", "k3", "k4", "k5", "k6", "k7", "k8")
    assert cb_check(sub, [1] * 8)
    k = [1, 1, 1, 1, 1, 1, 2, 1]
    assert not cb_check(sub, k)
    k = [2, 1, 1, 1, 1, 1, 2, 1]  # k1 k3 k5 k8 = k2 k4 k6 k7
    assert cb_check(sub, k)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_cb_always_holds_for_weakly_reversible_deficiency_zero(data):
    name = data.draw(st.sampled_from(["mm_rev", "compinh", "lin3"]))
    net = load_fixture(name)
    k = [data.draw(st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=10)) for _ in range(net.m)]
    assume(all(v > 0 for v in k))
    assert cb_check(net, k).balanced


def test_cb_rejects_bad_input():
    with pytest.raises(NotWeaklyReversible):
        cb_check(load_fixture("futile"), [1] * 6)
    with pytest.raises(ValueError):
        cb_check(load_fixture("mm_rev"), [1, 0, 1, 1])


@pytest.mark.parametrize("name", ["mm_rev", "compinh", "lin3", "futile_rev"])
def test_tree_constants_lie_in_the_kernel(name, rng):
    net = load_fixture(name)
    k = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(net.m)]
    A = laplacian(net, k)
    for comp in digraph(net).sccs:
        psi = tree_constants(A, comp)
        assert all(v > 0 for v in psi.values())
        vec = [psi.get(j, Fraction(0)) for j in range(net.d)]
        assert all(v == 0 for v in A @ vec)


# --------------------------------------------------------------------------
# first-order networks


def test_lin3_first_order():
    certs = first_order_tfpv(load_fixture("lin3"))
    assert _labels(certs) == [({"k1", "km1"}, 2), ({"k1", "km2"}, 2), ({"k2", "km2"}, 2)]
    assert all(c.justification == FIRST_ORDER_TERMINAL and c.verification.passed for c in certs)


def test_inflow_first_order():
    certs = first_order_tfpv(load_fixture("inflow3"))
    assert len(certs) == 1
    assert certs[0].witness_rates == (1, 1, 0)
    assert certs[0].dimension == 2
    assert certs[0].verification.passed


def test_first_order_rejects_higher_order():
    with pytest.raises(NotFirstOrder):
        first_order_tfpv(load_fixture("mm_rev"))


# --------------------------------------------------------------------------
# prechecks


@pytest.mark.parametrize(
    "name, verdict",
    [
        ("futile", EXCLUDED_BY_MINORS),
        ("mm_rev", EXCLUDED_BY_MINORS),
        ("compinh", EXCLUDED_BY_MINORS),
        ("futile_rev", EXCLUDED_BY_MINORS),
        ("kinase", EXCLUDED_BY_MINORS),
        ("lin3", EXCLUDED_BY_MINORS),
        ("mm_irrev", EXCLUDED_BY_INJECTIVITY),
        ("minus", INCONCLUSIVE),
        ("net1", INCONCLUSIVE),
        ("ex35", INCONCLUSIVE),
    ],
)
def test_precheck_verdicts(name, verdict):
    assert no_positive_tfpv_precheck(load_fixture(name)).verdict == verdict


def test_futile_witness_minor():
    res = no_positive_tfpv_precheck(load_fixture("futile"))
    assert res.witness.columns == (0, 1, 4)
    assert res.witness.is_flux_monomial
    assert len(res.rays) == 3


def test_precheck_exclusion_matches_rank_at_random_positive_equilibria(rng):
    # on mm_rev every positive stationary point has Jacobian rank 2 = rank N
    net = load_fixture("mm_rev")
    for _ in range(10):
        k = [Fraction(rng.randint(1, 9), rng.randint(1, 5)) for _ in range(4)]
        x1, x2, x4 = (Fraction(rng.randint(1, 9), rng.randint(1, 5)) for _ in range(3))
        x3 = k[0] * x1 * x2 / k[1]
        k[3] = k[2] * x3 / (x4 * x2)
        x = [x1, x2, x3, x4]
        assert all(v == 0 for v in rhs_eval(net, k, x))
        assert verify_tfpv_at_point(net, k, x, 2).jacobian_rank == 2


# --------------------------------------------------------------------------
# point verification


def test_mm_rev_point():
    v = verify_tfpv_at_point(load_fixture("mm_rev"), [1, 1, 0, 0], [1, 1, 1, 0], 3)
    assert v.passed
    assert str(v.divided_charpoly) == "t + 3"


def test_point_verification_failures():
    net = load_fixture("mm_rev")
    v = verify_tfpv_at_point(net, [1, 1, 0, 0], [1, 1, 2, 0], 3)
    assert not v.stationary and not v.passed
    v = verify_tfpv_at_point(net, [1] * 4, [1] * 4, 2)
    assert v.conditions_passed and not v.dimension_ok
    assert "not a TFPV dimension" in " ".join(v.notes)
    v = verify_tfpv_at_point(net, [1, 1, 0, 0], [1, 1, 1, 0], 2)
    assert not v.rank_ok
    assert v.to_dict()["passed"] is False


def test_matrices_are_unchanged_by_enumeration():
    net = load_fixture("compinh")
    before = build_matrices(net).N.tolist()
    enumerate_structural_tfpv(net)
    assert build_matrices(net).N.tolist() == before
