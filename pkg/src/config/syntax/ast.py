from typing import List, Union
from abc import ABC
import re


class Node(ABC):
    """Protocol representing a node in the AST.

    Every node remembers the line it starts on for diagnostics; the line is
    left out of the representation.
    """

    line: int = 0

    def method_name(self, prefix: str) -> str:
        """Name of the visitor method for this node, e.g. `analyze_span_literal`."""
        snake = re.sub(r"(?<!^)(?=[A-Z])", "_", type(self).__name__).lower()
        return f"{prefix}_{snake}"


class Value(Node):
    """Protocol representing the right-hand side of an entry."""


# Config file
class ConfigFile(Node):
    """Node representing a whole config file.

    Args:
        sections (List[Section]): The sections in file order.
    """

    def __init__(self, sections: List["Section"]) -> None:
        self.sections: List[Section] = sections

    def __repr__(self) -> str:
        return f"ConfigFile({self.sections})"


class Section(Node):
    """Node representing a section and its entries.

    Syntax:
        [<name>]
        <entries>

    Example:
        [space]
        fock_dim = 10
    """

    def __init__(self, name: str, entries: List["Entry"], line: int = 0) -> None:
        self.name = name
        self.entries = entries
        self.line = line

    def __repr__(self) -> str:
        return f"Section({self.name}, {self.entries})"


class Entry(Node):
    """Node representing a key-value entry.

    Syntax:
        <key> = <value>

    Example:
        horizon = 250
    """

    def __init__(self, key: str, value: Value, line: int = 0) -> None:
        self.key = key
        self.value = value
        self.line = line

    def __repr__(self) -> str:
        return f"Entry({self.key}, {self.value})"


# Values
class NumberLiteral(Value):
    """Node representing an integer or real number.

    Example:
        -0.891, 400, 1e-8
    """

    def __init__(self, value: Union[int, float], line: int = 0) -> None:
        self.value = value
        self.line = line

    def __repr__(self) -> str:
        return f"NumberLiteral({self.value})"


class BooleanLiteral(Value):
    """Node representing a boolean.

    Example:
        true
    """

    def __init__(self, value: bool, line: int = 0) -> None:
        self.value = value
        self.line = line

    def __repr__(self) -> str:
        return f"BooleanLiteral({self.value})"


class WordLiteral(Value):
    """Node representing a bare word, used for names and choices.

    Example:
        rwsc, omega_g
    """

    def __init__(self, value: str, line: int = 0) -> None:
        self.value = value
        self.line = line

    def __repr__(self) -> str:
        return f"WordLiteral({self.value})"


class StringLiteral(Value):
    """Node representing a quoted string.

    Example:
        "out/rwsc_detuning_scan.csv"
    """

    def __init__(self, value: str, line: int = 0) -> None:
        self.value = value
        self.line = line

    def __repr__(self) -> str:
        return f"StringLiteral({self.value})"


class ListLiteral(Value):
    """Node representing a bracketed list; lists nest and may span lines.

    Example:
        [[-1.0, 0.3], [-0.9, 0.45]]
    """

    def __init__(self, elements: List[Value], line: int = 0) -> None:
        self.elements = elements
        self.line = line

    def __repr__(self) -> str:
        return f"ListLiteral({self.elements})"


class SpanLiteral(Value):
    """Node representing an inclusive arithmetic progression.

    Syntax:
        <start> to <stop> by <step>

    Example:
        -1.1 to -0.6 by 0.01
    """

    def __init__(
        self,
        start: NumberLiteral,
        stop: NumberLiteral,
        step: NumberLiteral,
        line: int = 0,
    ) -> None:
        self.start = start
        self.stop = stop
        self.step = step
        self.line = line

    def __repr__(self) -> str:
        return f"SpanLiteral({self.start}, {self.stop}, {self.step})"
