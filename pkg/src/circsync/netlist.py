"""Text netlist front end.

A netlist is a plain-text description of a circuit, one element per line::

    # resonator 1
    C C1 1 0 1.01p
    L L1 1 0 1n
    R R12 1 2 4k

Each line names a two-terminal element: a kind letter (``C``, ``L``, ``R``
or ``J`` for a Josephson junction), a unique element name, the two node
ids it connects, and a positive value with an optional engineering
suffix.  Node ``0`` is the ground rail and must appear somewhere in every
netlist.  The kind letter may also be fused to the name (``C1 1 0 1.01p``
works and means the same thing).  Values are farads, henries, ohms, or
amperes of critical current for junctions.

Parsing produces a :class:`CircuitSpec` with node ids renumbered to the
contiguous range ``1..N`` (ground stays ``0``); rendering the spec back to
text round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

KINDS = {
    "C": "capacitor",
    "L": "inductor",
    "R": "resistor",
    "J": "junction",
}
KIND_LETTER = {v: k for k, v in KINDS.items()}

SUFFIX_EXP = {
    "f": -15,
    "p": -12,
    "n": -9,
    "u": -6,
    "m": -3,
    "k": 3,
    "M": 6,
    "G": 9,
}


class NetlistError(ValueError):
    """Raised for malformed netlist text or invalid element data."""


@dataclass(frozen=True)
class ElementDecl:
    """One two-terminal element of the circuit.

    ``value`` is in SI units of the element kind; for junctions it is the
    critical current I_c0 in amperes.
    """

    kind: str
    name: str
    node_a: int
    node_b: int
    value: float
    auxiliary: bool = False

    def __post_init__(self):
        if self.kind not in KIND_LETTER:
            raise NetlistError(f"unknown element kind {self.kind!r}")
        if self.value <= 0:
            raise NetlistError(f"element {self.name}: value must be positive, got {self.value}")
        if self.node_a == self.node_b:
            raise NetlistError(f"element {self.name}: terminals must differ (both {self.node_a})")
        if self.node_a < 0 or self.node_b < 0:
            raise NetlistError(f"element {self.name}: node ids must be non-negative")


@dataclass(frozen=True)
class CircuitSpec:
    """Validated, canonicalized circuit: ordered elements plus node set 1..N."""

    elements: tuple[ElementDecl, ...]
    n_nodes: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "n_nodes", max(max(e.node_a, e.node_b) for e in self.elements))

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_nodes + 1))


def parse_value(text: str) -> float:
    """Parse a decimal literal with an optional engineering suffix.

    Suffixes: f, p, n, u, m (negative powers) and k, M, G (positive).
    Plain scientific notation is accepted too.  The result must be
    positive.
    """
    text = text.strip()
    if not text:
        raise NetlistError("empty value")
    try:
        out = float(text)
    except ValueError:
        body, suffix = text[:-1], text[-1]
        if suffix not in SUFFIX_EXP:
            raise NetlistError(f"bad value {text!r}: unknown suffix {suffix!r}") from None
        try:
            out = float(body) * 10.0 ** SUFFIX_EXP[suffix]
        except ValueError:
            raise NetlistError(f"bad value {text!r}: malformed number {body!r}") from None
    if not out > 0:
        raise NetlistError(f"value must be positive, got {text!r}")
    return out


def format_value(value: float) -> str:
    """Render a value so that parse_value reads back the same float."""
    return repr(float(value))


def _parse_line(line: str, lineno: int) -> ElementDecl:
    tokens = line.split()
    if len(tokens) == 5:
        kind_letter, name = tokens[0], tokens[1]
        if kind_letter not in KINDS:
            raise NetlistError(f"line {lineno}: unknown element kind {kind_letter!r}")
    elif len(tokens) == 4:
        name = tokens[0]
        kind_letter = name[0]
        if kind_letter not in KINDS:
            raise NetlistError(f"line {lineno}: unknown element kind {kind_letter!r}")
        tokens = [kind_letter] + tokens
    else:
        raise NetlistError(
            f"line {lineno}: expected 'KIND NAME NODE_A NODE_B VALUE', got {line.strip()!r}"
        )
    try:
        node_a = int(tokens[2])
        node_b = int(tokens[3])
    except ValueError:
        raise NetlistError(f"line {lineno}: node ids must be integers") from None
    try:
        value = parse_value(tokens[4])
        # "Caux" is the reserved name prefix for regularization capacitors,
        # so the auxiliary marking survives a render/parse round trip.
        aux = KINDS[kind_letter] == "capacitor" and name.startswith("Caux")
        return ElementDecl(KINDS[kind_letter], name, node_a, node_b, value, auxiliary=aux)
    except NetlistError as err:
        raise NetlistError(f"line {lineno}: {err}") from None


def parse_netlist(text: str) -> CircuitSpec:
    """Parse netlist text into a canonical CircuitSpec.

    Comments start with ``#`` and run to end of line; blank lines are
    skipped.  Node ids are renumbered contiguously (sorted order), ground
    stays 0, element order is preserved.
    """
    elements: list[ElementDecl] = []
    names: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        elem = _parse_line(line, lineno)
        if elem.name in names:
            raise NetlistError(
                f"line {lineno}: duplicate element name {elem.name!r}"
                f" (first used on line {names[elem.name]})"
            )
        names[elem.name] = lineno
        elements.append(elem)
    if not elements:
        raise NetlistError("empty netlist: no elements found")

    touched: dict[int, int] = {}
    for elem in elements:
        for node in (elem.node_a, elem.node_b):
            touched[node] = touched.get(node, 0) + 1
    if 0 not in touched:
        raise NetlistError("no element is connected to ground (node 0)")
    dangling = sorted(n for n, count in touched.items() if n != 0 and count < 2)
    if dangling:
        raise NetlistError(f"dangling nodes (fewer than two element terminals): {dangling}")

    renumber = {0: 0}
    for new_id, old_id in enumerate(sorted(n for n in touched if n != 0), start=1):
        renumber[old_id] = new_id
    elements = [
        replace(e, node_a=renumber[e.node_a], node_b=renumber[e.node_b]) for e in elements
    ]
    return CircuitSpec(tuple(elements))


def render_netlist(spec: CircuitSpec) -> str:
    """Render a spec back to netlist text; parse_netlist(render(s)) == s."""
    lines = []
    for e in spec.elements:
        lines.append(
            f"{KIND_LETTER[e.kind]} {e.name} {e.node_a} {e.node_b} {format_value(e.value)}"
        )
    return "\n".join(lines) + "\n"
