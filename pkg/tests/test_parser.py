import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from strategies import networks

from tfpvkit import FIXTURES, emit_report, load_fixture, parse, serialize, structure
from tfpvkit.errors import (
    CrnSyntaxError,
    DuplicateLabel,
    DuplicateReaction,
    InvalidNetwork,
    SelfLoop,
    UnboundCoefficient,
    UnboundRate,
)
from tfpvkit.parser import Report, network_dict, to_jsonable
from tfpvkit.tfpv import enumerate_structural_tfpv

MM_REV = "X1 + X2 <-> X3 ; k1, km1\nX3 <-> X4 + X2 ; k2, km2"


def test_mm_rev_text():
    net = parse(MM_REV)
    assert (net.n, net.d, net.m) == (4, 3, 4)
    assert net.labels == ("k1", "km1", "k2", "km2")
    assert net.complexes == ((1, 1, 0, 0), (0, 0, 1, 0), (0, 1, 0, 1))


def test_inflow_has_zero_complex():
    net = parse("0 -> X1 ; k")
    assert (0,) in net.complexes
    assert net.has_inflow()


def test_coefficient_forms_and_bindings():
    net = parse("2X1 + 3 X2 -> 2*X3 ; k  # comment\nk = 3/2\n")
    assert net.complexes == ((2, 3, 0), (0, 0, 2))
    assert net.rate_values == {"k": Fraction(3, 2)}
    assert parse("X1 -> X2 ; k\nk = 0.25").rate_values["k"] == Fraction(1, 4)


@pytest.mark.parametrize(
    "text, error, where",
    [
        ("", CrnSyntaxError, "line 1, column 1"),
        ("# only a comment\n", CrnSyntaxError, "line 1, column 1"),
        ("X1 -> X1 ; k", SelfLoop, "line 1, column 4"),
        ("X1 -> X2 ; k\nX1 -> X2 ; j", DuplicateReaction, "line 2"),
        ("X1 -> X2 ; k\nX2 -> X1 ; k", DuplicateLabel, "line 2, column 12"),
        ("0X1 -> X2 ; k", UnboundCoefficient, "line 1, column 1"),
        ("X1 -> X2 ; k\nq = 1", UnboundRate, "line 2, column 1"),
        ("X1 => X2 ; k", CrnSyntaxError, "line 1, column 4"),
        ("X1 <-> X2 ; k", CrnSyntaxError, "line 1"),
        ("X1 -> X2 ; k\n@integral c = X1", InvalidNetwork, "line 2"),
        ("X1 -> X2 ; k\nk = -1", InvalidNetwork, "line 2"),
    ],
)
def test_errors_carry_positions(text, error, where):
    with pytest.raises(error) as info:
        parse(text)
    assert str(info.value).startswith(where)


def test_fixture_roundtrip(fixture_net):
    _, net = fixture_net
    text = serialize(net)
    assert parse(text) == net
    assert serialize(parse(text)) == text


@settings(max_examples=100, deadline=None)
@given(networks(max_complexes=6, max_reactions=8))
def test_random_roundtrip(net):
    assert parse(serialize(net)) == net


def test_serialize_merges_reverse_pairs():
    assert serialize(parse(MM_REV)).splitlines()[:2] == ["X1 + X2 <-> X3 ; k1, km1", "X3 <-> X2 + X4 ; k2, km2"]


def test_report_schema_and_rationals():
    net = load_fixture("compinh")
    rep = Report("analyze", network_dict(net, "compinh"), structure(net).to_dict())
    data = json.loads(emit_report(rep))
    assert sorted(data) == ["certificates", "command", "network", "summary", "warnings"]
    assert data["summary"]["deficiency"] == 0
    assert data["summary"]["components"] == 2
    assert data["certificates"] == []
    assert to_jsonable(Fraction(3, 4)) == "3/4"


def test_certificate_report_for_mm_rev():
    net = load_fixture("mm_rev")
    certs = enumerate_structural_tfpv(net)
    data = json.loads(emit_report(Report("tfpv", network_dict(net), certificates=certs)))
    assert [c["dimension"] for c in data["certificates"]] == [3, 3]


@pytest.mark.parametrize("name", FIXTURES)
def test_emit_is_deterministic(name):
    net = load_fixture(name)
    a = emit_report(Report("analyze", network_dict(net, name), structure(net).to_dict()))
    b = emit_report(Report("analyze", network_dict(load_fixture(name), name), structure(load_fixture(name)).to_dict()))
    assert a == b
