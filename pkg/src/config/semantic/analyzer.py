from typing import Dict, Optional
from config.semantic.schema import SCHEMA
from config.semantic.symbol import SymbolTable
from config.semantic.types import ListType, UnionType, ValueType, WordType, describe
from config.semantic.typing import SchemaAnalyzerABC
from config.semantic.values import ValueAnalyzer
from config.syntax.ast import *


class SchemaAnalyzer(SchemaAnalyzerABC):
    """
    The SchemaAnalyzer traverses the AST of a config file and ensures that:\n
        1) Every section and key is known to the schema.\n
        2) No section or key is defined twice.\n
        3) Every value has the kind of value its key expects.\n
    Resolved values are collected in the symbol table.
    """

    def __init__(
        self, schema: Optional[Dict[str, Dict[str, ValueType]]] = None
    ) -> None:
        self.schema = SCHEMA if schema is None else schema
        self.symbol_table = SymbolTable()
        self.value_analyzer = ValueAnalyzer(self)

    def analyze(self, node: Node) -> Optional[ValueType]:
        """Analyses a node in the AST.

        Args:
            node (Node): The AST node to analyse.

        Returns:
            Optional[ValueType]: The inferred type of value nodes, else None.
        """
        method_name = node.method_name("analyze")

        # Value literals are typed by the ValueAnalyzer
        analyzer = self.value_analyzer if isinstance(node, Value) else self
        analyze = getattr(analyzer, method_name, self.analyze_generic)

        return analyze(node)

    def analyze_generic(self, node: Node) -> None:
        """Called if no explicit analyzer function exists for a node.
        Recursively analyses children.

        Args:
            node (Node): The AST node to analyse.
        """
        for attr_value in vars(node).values():
            if isinstance(attr_value, Node):
                self.analyze(attr_value)
            elif isinstance(attr_value, (list, tuple)):
                for item in attr_value:
                    if isinstance(item, Node):
                        self.analyze(item)

    def analyze_config_file(self, node: ConfigFile) -> None:
        """Analyses every section of the file.

        Args:
            node (ConfigFile): The root node.
        """
        for section in node.sections:
            self.analyze(section)

    def analyze_section(self, node: Section) -> None:
        """Opens the section scope and analyses its entries.

        Args:
            node (Section): The section to analyse.

        Raises:
            NameError: If the section is unknown or defined twice.
        """
        if node.name not in self.schema:
            raise NameError(f"Unknown section [{node.name}] on line {node.line}")

        try:
            self.symbol_table.enter_scope(node.name, node.line)
        except KeyError:  # The scope already exists
            raise NameError(
                f"Section [{node.name}] defined twice, again on line {node.line}"
            ) from None

        for entry in node.entries:
            self.analyze(entry)

        self.symbol_table.exit_scope()  # Back to file level for the next header

    def analyze_entry(self, node: Entry) -> ValueType:
        """Checks an entry against the schema and records its value.

        Args:
            node (Entry): The entry to analyse.

        Returns:
            ValueType: The inferred type of the value.

        Raises:
            NameError: If the key is unknown or repeated.
            TypeError: If the value does not fit the key.
        """
        section = self.symbol_table.current
        assert section is not None  # Entries only occur inside a section
        expected_types = self.schema[section.name]

        if node.key not in expected_types:
            raise NameError(
                f"Unknown key `{node.key}` in [{section.name}] on line {node.line}"
            )
        expected = expected_types[node.key]

        value_type = self.analyze(node.value)
        assert value_type is not None
        if not expected.accepts(value_type):
            raise TypeError(
                f"Key `{node.key}` expects {describe(expected)}, "
                f"got {describe(value_type)} on line {node.line}"
            )
        self._check_choices(node.key, expected, node.value)  # Word enums, e.g. scheme

        try:
            value = self.value_analyzer.evaluate(node.value)
            self.symbol_table.define(node.key, value_type, value, node.line)
        except KeyError:
            raise NameError(
                f"Key `{node.key}` repeated in [{section.name}] on line {node.line}"
            ) from None

        return value_type

    def _check_choices(self, key: str, expected: ValueType, value: Value) -> None:
        """Checks bare words against the allowed choices, inside lists too.

        Raises:
            TypeError: If a word is not one of the allowed choices.
        """
        match expected, value:
            case UnionType(options=options), _:
                # Only the options the value already fits constrain its words
                fitting = [
                    option
                    for option in options
                    if option.accepts(self.analyze(value) or ListType(None))
                ]
                for option in fitting:
                    self._check_choices(key, option, value)
            case WordType(choices=choices), WordLiteral() if choices:
                if value.value not in choices:
                    raise TypeError(
                        f"Key `{key}` expects {describe(expected)}, "
                        f"got `{value.value}` on line {value.line}"
                    )
            case ListType(element_type=element), ListLiteral() if element is not None:
                for item in value.elements:
                    self._check_choices(key, element, item)
            case _:
                pass
