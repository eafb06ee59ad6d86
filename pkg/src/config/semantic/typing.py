from typing import Any, Dict, Optional, Protocol
from abc import ABC, abstractmethod
from config.semantic.types import ValueType
from config.syntax.ast import *


class SymbolABC(Protocol):
    """Abstract class for symbol table entries."""

    name: str
    value_type: ValueType
    value: Any
    line: int


class ScopeABC(Protocol):
    """Abstract class for symbol table scopes (one per section)."""

    name: str
    line: int
    symbols: Dict[str, SymbolABC]


class SymbolTableABC(ABC):
    """Abstract class for the symbol table."""

    scopes: Dict[str, ScopeABC]

    @abstractmethod
    def enter_scope(self, name: str, line: int = 0) -> None:
        """Open the scope of a section."""

    @abstractmethod
    def exit_scope(self) -> None:
        """Close the current section scope."""

    @abstractmethod
    def define(
        self, name: str, value_type: ValueType, value: Any, line: int = 0
    ) -> None:
        """Define a key in the current scope."""

    @abstractmethod
    def lookup(self, section: str, name: str) -> Optional[SymbolABC]:
        """Lookup a key of a section."""


class ValueAnalyzerABC(ABC):
    """Abstract class for the value analyzer."""

    @abstractmethod
    def analyze_number_literal(self, node: NumberLiteral) -> ValueType:
        """Infer the type of a number."""

    @abstractmethod
    def analyze_boolean_literal(self, node: BooleanLiteral) -> ValueType:
        """Infer the type of a boolean."""

    @abstractmethod
    def analyze_word_literal(self, node: WordLiteral) -> ValueType:
        """Infer the type of a bare word."""

    @abstractmethod
    def analyze_string_literal(self, node: StringLiteral) -> ValueType:
        """Infer the type of a quoted string."""

    @abstractmethod
    def analyze_list_literal(self, node: ListLiteral) -> ValueType:
        """Infer the type of a list."""

    @abstractmethod
    def analyze_span_literal(self, node: SpanLiteral) -> ValueType:
        """Infer the type of a span."""

    @abstractmethod
    def evaluate(self, node: Value) -> Any:
        """Compute the Python value of a value node."""


class SchemaAnalyzerABC(ABC):
    """Abstract class for the schema analyzer."""

    symbol_table: SymbolTableABC
    value_analyzer: ValueAnalyzerABC

    @abstractmethod
    def analyze(self, node: Node) -> Optional[ValueType]:
        """Analyze a node in the AST."""

    @abstractmethod
    def analyze_config_file(self, node: ConfigFile) -> None:
        """Analyze the root node."""

    @abstractmethod
    def analyze_section(self, node: Section) -> None:
        """Analyze a section."""

    @abstractmethod
    def analyze_entry(self, node: Entry) -> ValueType:
        """Analyze an entry against the schema."""
