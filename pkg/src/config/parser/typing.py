from typing import List, Protocol
from abc import ABC, abstractmethod
from config.lexer.token import Token
from config.lexer.tokens import TokenType
from config.syntax.ast import *


class ValueParserABC(Protocol):
    """Abstract base class for the value parser."""

    @abstractmethod
    def parse_value(self) -> Value:
        """Parses the value of an entry."""

    @abstractmethod
    def parse_scalar(self) -> Value:
        """Parses a number, boolean, word or string."""

    @abstractmethod
    def parse_number(self) -> NumberLiteral:
        """Parses a number."""

    @abstractmethod
    def parse_list_literal(self) -> ListLiteral:
        """Parses a bracketed list."""

    @abstractmethod
    def parse_span_literal(self, start: NumberLiteral) -> SpanLiteral:
        """Parses the `to ... by ...` tail of a span."""


class ParserABC(ABC):
    """Abstract base class for the config file parser."""

    value_parser: ValueParserABC

    @abstractmethod
    def parse(self) -> ConfigFile:
        """Parses the tokens into a ConfigFile AST node."""

    @abstractmethod
    def parse_section(self) -> Section:
        """Parses a section header and its entries."""

    @abstractmethod
    def parse_entry(self) -> Entry:
        """Parses a key-value entry."""

    @abstractmethod
    def consume(self, token_type: TokenType) -> Token:
        """Consumes the current token if it matches the
        expected type, otherwise raises an error."""

    @abstractmethod
    def current(self) -> Token:
        """Retrieves the token at the current position."""

    @abstractmethod
    def is_eof(self) -> bool:
        """Checks if the current token is the end-of-file token."""

    @abstractmethod
    def skip_newlines(self) -> None:
        """Consumes any run of newline tokens."""
