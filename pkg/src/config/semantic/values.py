from typing import Any, List, Optional, Union
import math
from config.semantic.types import (
    BooleanType,
    ListType,
    NumberType,
    StringType,
    ValueType,
    WordType,
)
from config.semantic.typing import SchemaAnalyzerABC, ValueAnalyzerABC
from config.syntax.ast import *

# Span points are rounded to this many decimals so that 0.1-type steps
# produce the values written in the file.
SPAN_DECIMALS = 12
SPAN_SLACK = 1e-9
MAX_SPAN_POINTS = 100_000


Number = Union[int, float]


def span_points(
    start: Number, stop: Number, step: Number, line: int = 0
) -> List[Number]:
    """Expands `start to stop by step`, including stop when the step lands on it.

    Raises:
        ValueError: If the step is zero or points away from stop.
    """
    if step == 0:
        raise ValueError(f"Span step must be non-zero on line {line}")
    if (stop - start) * step < 0:
        raise ValueError(
            f"Span step {step} never reaches {stop} from {start} on line {line}"
        )

    count = math.floor((stop - start) / step + SPAN_SLACK) + 1  # stop is inclusive
    if count > MAX_SPAN_POINTS:
        raise ValueError(
            f"Span on line {line} has {count} points, more than {MAX_SPAN_POINTS}"
        )

    if all(isinstance(v, int) for v in (start, stop, step)):  # Integer spans stay exact
        return [int(start + i * step) for i in range(count)]

    return [round(start + i * step, SPAN_DECIMALS) for i in range(count)]


class ValueAnalyzer(ValueAnalyzerABC):
    """Class that infers the types of value nodes and evaluates them."""

    def __init__(self, analyzer: SchemaAnalyzerABC) -> None:
        self.analyzer = analyzer

    def analyze_number_literal(self, node: NumberLiteral) -> ValueType:
        return NumberType(integer=isinstance(node.value, int))

    def analyze_boolean_literal(self, node: BooleanLiteral) -> ValueType:
        return BooleanType()

    def analyze_word_literal(self, node: WordLiteral) -> ValueType:
        return WordType()

    def analyze_string_literal(self, node: StringLiteral) -> ValueType:
        return StringType()

    def analyze_list_literal(self, node: ListLiteral) -> ValueType:
        """Infers the element type shared by all elements; integers and
        reals unify to reals, and a span element counts as its numbers.

        Raises:
            TypeError: If the elements have incompatible types.
        """
        element_type: Optional[ValueType] = None
        for element in node.elements:
            current = self.analyzer.analyze(element)
            if isinstance(element, SpanLiteral) and isinstance(current, ListType):
                current = current.element_type
            if current is None:
                continue
            if element_type is None or element_type.accepts(current):
                element_type = element_type or current
            elif current.accepts(element_type):
                element_type = current  # Widen, e.g. int to real
            else:
                raise TypeError(
                    f"List mixes {element_type} and {current} on line {node.line}"
                )

        return ListType(element_type)

    def analyze_span_literal(self, node: SpanLiteral) -> ValueType:
        integer = all(
            isinstance(part.value, int) for part in (node.start, node.stop, node.step)
        )
        return ListType(NumberType(integer=integer))

    def evaluate(self, node: Value) -> Any:
        """Computes the Python value of a value node.

        Raises:
            ValueError: If a span is malformed.
        """
        method_name = node.method_name("evaluate")
        return getattr(self, method_name)(node)

    def evaluate_number_literal(self, node: NumberLiteral) -> Union[int, float]:
        return node.value

    def evaluate_boolean_literal(self, node: BooleanLiteral) -> bool:
        return node.value

    def evaluate_word_literal(self, node: WordLiteral) -> str:
        return node.value

    def evaluate_string_literal(self, node: StringLiteral) -> str:
        return node.value

    def evaluate_list_literal(self, node: ListLiteral) -> List[Any]:
        values: List[Any] = []
        for element in node.elements:
            # A span inside a list contributes its points, not a nested list.
            if isinstance(element, SpanLiteral):
                values.extend(self.evaluate_span_literal(element))
            else:
                values.append(self.evaluate(element))

        return values

    def evaluate_span_literal(self, node: SpanLiteral) -> List[Union[int, float]]:
        start, stop, step = node.start.value, node.stop.value, node.step.value
        return span_points(start, stop, step, node.line)
