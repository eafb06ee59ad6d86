from abc import ABC, abstractmethod
from typing import Any, Optional, Tuple


class ValueType(ABC):
    """Abstract class for the kinds of values a config key accepts."""

    @abstractmethod
    def accepts(self, value_type: "ValueType") -> bool:
        """Whether a value of the given inferred type fits this type."""

    def __eq__(self, other: Any) -> bool:
        return repr(self) == repr(other)

    def __hash__(self) -> int:
        return hash(repr(self))


class NumberType(ValueType):
    """Represents numbers; integer-only when `integer` is set.

    Args:
        integer (bool): Whether only integers are accepted.
    """

    def __init__(self, integer: bool = False) -> None:
        self.integer = integer

    def __repr__(self) -> str:
        return "NumberType(int)" if self.integer else "NumberType(real)"

    def accepts(self, value_type: ValueType) -> bool:
        if not isinstance(value_type, NumberType):
            return False
        return value_type.integer or not self.integer


class BooleanType(ValueType):
    """Represents booleans."""

    def __repr__(self) -> str:
        return "BooleanType()"

    def accepts(self, value_type: ValueType) -> bool:
        return isinstance(value_type, BooleanType)


class WordType(ValueType):
    """Represents bare words, optionally restricted to a set of choices.

    Args:
        choices (Optional[Tuple[str, ...]]): Allowed words, any if None.
    """

    def __init__(self, choices: Optional[Tuple[str, ...]] = None) -> None:
        self.choices = choices

    def __repr__(self) -> str:
        return f"WordType({'|'.join(self.choices)})" if self.choices else "WordType()"

    def accepts(self, value_type: ValueType) -> bool:
        return isinstance(value_type, WordType)


class StringType(ValueType):
    """Represents quoted strings."""

    def __repr__(self) -> str:
        return "StringType()"

    def accepts(self, value_type: ValueType) -> bool:
        return isinstance(value_type, StringType)


class ListType(ValueType):
    """Represents lists with a common element type. A span is a list of
    numbers, and the empty list fits any list type.

    Args:
        element_type (Optional[ValueType]): Element type, None for an empty list.
    """

    def __init__(self, element_type: Optional[ValueType]) -> None:
        self.element_type = element_type

    def __repr__(self) -> str:
        return f"ListType({self.element_type})"

    def accepts(self, value_type: ValueType) -> bool:
        if not isinstance(value_type, ListType):
            return False
        if value_type.element_type is None:
            return True
        if self.element_type is None:
            return False
        return self.element_type.accepts(value_type.element_type)


class UnionType(ValueType):
    """Represents a key accepting any of several types.

    Args:
        options (Tuple[ValueType, ...]): The accepted types.
    """

    def __init__(self, *options: ValueType) -> None:
        self.options = options

    def __repr__(self) -> str:
        return f"UnionType({', '.join(map(repr, self.options))})"

    def accepts(self, value_type: ValueType) -> bool:
        return any(option.accepts(value_type) for option in self.options)


def describe(value_type: ValueType) -> str:
    """Human-readable name of a type for diagnostics."""
    match value_type:
        case NumberType(integer=True):
            return "integer"
        case NumberType():
            return "number"
        case BooleanType():
            return "boolean"
        case WordType(choices=None):
            return "word"
        case WordType(choices=choices):
            return f"one of {', '.join(choices or ())}"
        case StringType():
            return "quoted string"
        case ListType(element_type=None):
            return "list"
        case ListType(element_type=element):
            return f"list of {describe(element)}"
        case UnionType(options=options):
            return " or ".join(describe(option) for option in options)
        case _:
            return repr(value_type)
