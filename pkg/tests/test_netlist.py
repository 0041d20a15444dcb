"""Netlist parsing, value suffixes, and round-trip serialization."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circsync.netlist import (
    ElementDecl,
    NetlistError,
    format_value,
    parse_netlist,
    parse_value,
    render_netlist,
)


SUFFIX_TABLE = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
}


class TestParseValue:
    def test_plain_numbers(self):
        assert parse_value("1.5") == 1.5
        assert parse_value("3") == 3.0
        assert parse_value("1e-9") == 1e-9
        assert parse_value("2.5e3") == 2500.0

    @pytest.mark.parametrize("suffix,scale", sorted(SUFFIX_TABLE.items()))
    def test_suffix_table(self, suffix, scale):
        assert parse_value("1" + suffix) == scale

    def test_suffix_examples(self):
        # suffix parsing multiplies, so allow one ulp against literals
        assert parse_value("1.01p") == pytest.approx(1.01e-12, rel=1e-15)
        assert parse_value("20.26f") == pytest.approx(20.26e-15, rel=1e-15)
        assert parse_value("4k") == 4e3
        assert parse_value("15.71M") == pytest.approx(15.71e6, rel=1e-15)
        assert parse_value("100n") == pytest.approx(100e-9, rel=1e-15)

    def test_case_sensitive_m(self):
        # milli and mega must stay distinct
        assert parse_value("1m") == 1e-3
        assert parse_value("1M") == 1e6

    @given(
        mant=st.floats(min_value=0.001, max_value=999.0,
                       allow_nan=False, allow_infinity=False),
        suffix=st.sampled_from(sorted(SUFFIX_TABLE)),
    )
    def test_suffix_is_multiplicative(self, mant, suffix):
        text = repr(mant) + suffix
        assert parse_value(text) == pytest.approx(
            mant * SUFFIX_TABLE[suffix], rel=1e-15)

    def test_rejects_garbage(self):
        for bad in ("", "x", "1q", "p", "1.2.3n", "--4"):
            with pytest.raises(NetlistError):
                parse_value(bad)

    def test_rejects_nonpositive(self):
        for bad in ("0", "-2.5e3", "-1p"):
            with pytest.raises(NetlistError):
                parse_value(bad)

    def test_format_round_trip(self):
        for v in (1.01e-12, 20.26e-15, 4e3, 1.0, 3.7e8):
            assert parse_value(format_value(v)) == v


FIG1_NETLIST = """\
# two dissipatively coupled resonators
C C1 1 0 1.01p
L L1 1 0 1n
R R1 1 0 15.71M
C C2 2 0 1.01p
L L2 2 0 1n
R R2 2 0 15.71M
C C12 1 2 20.26f
L L12 1 2 10n
R R12 1 2 4k
"""

PATHO_NETLIST = """\
C C1 1 0 1.01p
L L1 1 0 1n
R R12 1 2 4k
L L23 2 3 1n
C C3 3 0 1.01p
L L3 3 0 1n
"""


class TestParseNetlist:
    def test_two_resonator_circuit(self):
        spec = parse_netlist(FIG1_NETLIST)
        assert spec.n_nodes == 2
        assert len(spec.elements) == 9
        kinds = sorted(e.kind for e in spec.elements)
        assert kinds == ["capacitor"] * 3 + ["inductor"] * 3 + ["resistor"] * 3
        c12 = next(e for e in spec.elements if e.name == "C12")
        assert (c12.node_a, c12.node_b) == (1, 2)
        assert c12.value == parse_value("20.26f")

    def test_chain_circuit_element_count(self):
        # three-node chain with a floating middle node: six elements
        spec = parse_netlist(PATHO_NETLIST)
        assert spec.n_nodes == 3
        assert len(spec.elements) == 6

    def test_four_token_form(self):
        spec = parse_netlist("C1 1 0 1p\nL1 1 0 1n\n")
        assert len(spec.elements) == 2
        assert spec.elements[0].kind == "capacitor"
        assert spec.elements[0].name == "C1"
        assert spec.elements[1].kind == "inductor"

    def test_comments_and_blank_lines(self):
        text = "# header\n\nC C1 1 0 1p\n  # indented comment\nL L1 1 0 1n\n"
        spec = parse_netlist(text)
        assert len(spec.elements) == 2

    def test_junction_kind(self):
        spec = parse_netlist("C Cq 1 0 77.5f\nJ J1 1 0 25n\n")
        j = spec.elements[1]
        assert j.kind == "junction"
        assert j.value == parse_value("25n")

    def test_caux_name_marks_auxiliary(self):
        spec = parse_netlist("C C1 1 0 1p\nL L1 1 0 1n\nC Caux2 1 0 1f\n")
        flags = {e.name: e.auxiliary for e in spec.elements}
        assert flags == {"C1": False, "L1": False, "Caux2": True}

    def test_node_canonicalization(self):
        # arbitrary labels map onto 1..N in sorted order, ground stays 0
        spec = parse_netlist("C C1 5 0 1p\nL L1 5 0 1n\nC C2 9 0 1p\n"
                             "L L2 9 0 1n\nR R12 5 9 4k\n")
        assert spec.n_nodes == 2
        r = next(e for e in spec.elements if e.name == "R12")
        assert (r.node_a, r.node_b) == (1, 2)

    def test_missing_ground_rejected(self):
        with pytest.raises(NetlistError, match="ground"):
            parse_netlist("C C1 1 2 1p\nL L1 1 2 1n\n")

    def test_duplicate_name_rejected_with_line(self):
        text = "C C1 1 0 1p\nL L1 1 0 1n\nC C1 1 0 2p\n"
        with pytest.raises(NetlistError, match="3"):
            parse_netlist(text)

    def test_self_loop_rejected(self):
        with pytest.raises(NetlistError):
            parse_netlist("C C1 1 1 1p\nL L1 1 0 1n\n")

    def test_unknown_kind_rejected(self):
        with pytest.raises(NetlistError):
            parse_netlist("Q Q1 1 0 1p\n")

    def test_wrong_token_count_rejected_with_line(self):
        with pytest.raises(NetlistError, match="2"):
            parse_netlist("C C1 1 0 1p\nL L1 1 0\n")

    def test_empty_netlist_rejected(self):
        with pytest.raises(NetlistError):
            parse_netlist("# nothing here\n")

    def test_nonpositive_value_rejected(self):
        with pytest.raises(NetlistError):
            parse_netlist("C C1 1 0 0\nL L1 1 0 1n\n")
        with pytest.raises(NetlistError):
            parse_netlist("C C1 1 0 -1p\nL L1 1 0 1n\n")


class TestRoundTrip:
    def test_render_then_parse(self):
        spec = parse_netlist(FIG1_NETLIST)
        text = render_netlist(spec)
        again = parse_netlist(text)
        assert again.n_nodes == spec.n_nodes
        assert [(e.kind, e.name, e.node_a, e.node_b, e.value)
                for e in again.elements] == \
               [(e.kind, e.name, e.node_a, e.node_b, e.value)
                for e in spec.elements]

    def test_rendered_text_is_five_token(self):
        spec = parse_netlist("C1 1 0 1p\n L1 1 0 1n\n")
        for line in render_netlist(spec).strip().splitlines():
            assert len(line.split()) == 5


def _netlists():
    """Strategy producing small valid netlists with exact float values."""
    kinds = st.sampled_from("CLRJ")
    values = st.floats(min_value=1e-15, max_value=1e7,
                       allow_nan=False, allow_infinity=False)

    def build(rows):
        lines = []
        for idx, (kind, other, val) in enumerate(rows):
            node_a = idx % 3 + 1
            node_b = 0 if other else (node_a % 3) + 1
            lines.append(f"{kind} {kind}{idx} {node_a} {node_b} "
                         f"{format_value(val)}")
        # give every node two ground paths so the dangling check passes
        for node in (1, 2, 3):
            lines.append(f"C Gc{node} {node} 0 1p")
            lines.append(f"L Gl{node} {node} 0 1n")
        return "\n".join(lines) + "\n"

    rows = st.lists(st.tuples(kinds, st.booleans(), values),
                    min_size=1, max_size=8)
    return rows.map(build)


@settings(max_examples=50, deadline=None)
@given(text=_netlists())
def test_round_trip_preserves_values_exactly(text):
    spec = parse_netlist(text)
    again = parse_netlist(render_netlist(spec))
    assert [(e.kind, e.node_a, e.node_b, e.value) for e in again.elements] \
        == [(e.kind, e.node_a, e.node_b, e.value) for e in spec.elements]
