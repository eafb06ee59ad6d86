from typing import List
from config.lexer.tokens import TokenType
from config.parser.typing import ParserABC, ValueParserABC
from config.syntax.ast import *


class ValueParser(ValueParserABC):
    """
    The ValueParser parses the right-hand side of entries
    using the provided parser.

    Attributes:
        parser (ParserABC): The main parser instance.
    """

    def __init__(self, parser: ParserABC) -> None:
        """Initialises the ValueParser with the main parser instance.

        Args:
            parser (ParserABC): The main parser instance.
        """
        self.parser = parser

    def parse_value(self) -> Value:
        """Parses a value: a list, a span or a scalar.

        Returns:
            Value: The parsed value.
        """
        if self.parser.current().token_type == TokenType.LBRACKET:
            return self.parse_list_literal()

        value = self.parse_scalar()
        if self.parser.current().token_type == TokenType.TO:  # `a to b by s`
            if not isinstance(value, NumberLiteral):
                line = self.parser.current().line
                raise SyntaxError(f"Span must start with a number on line {line}")
            return self.parse_span_literal(value)

        return value

    def parse_scalar(self) -> Value:
        """Parses a number, boolean, bare word or quoted string.

        Returns:
            Value: The parsed literal.

        Raises:
            SyntaxError: If the current token does not start a scalar.
        """
        token = self.parser.current()

        match token.token_type:
            case TokenType.INT_LITERAL | TokenType.FLOAT_LITERAL:
                return self.parse_number()
            case TokenType.BOOLEAN_LITERAL:
                self.parser.consume(TokenType.BOOLEAN_LITERAL)
                return BooleanLiteral(token.value == "true", token.line)
            case TokenType.IDENTIFIER:
                self.parser.consume(TokenType.IDENTIFIER)
                return WordLiteral(token.value, token.line)
            case TokenType.SINGLE_QUOTE | TokenType.DOUBLE_QUOTE:
                self.parser.consume(token.token_type)  # Opening quote
                str_token = self.parser.consume(TokenType.STRING_LITERAL)
                self.parser.consume(token.token_type)  # Matching closing quote
                return StringLiteral(str_token.value, token.line)
            case _:
                raise SyntaxError(
                    f"Unexpected token {token.value!r} on line {token.line}"
                )

    def parse_number(self) -> NumberLiteral:
        """Parses an integer or real number.

        Returns:
            NumberLiteral: The parsed number.
        """
        token = self.parser.current()
        if token.token_type == TokenType.INT_LITERAL:
            self.parser.consume(TokenType.INT_LITERAL)
            return NumberLiteral(int(token.value), token.line)

        self.parser.consume(TokenType.FLOAT_LITERAL)
        return NumberLiteral(float(token.value), token.line)

    def parse_list_literal(self) -> ListLiteral:
        """Parses a bracketed, comma-separated list. Newlines inside the
        brackets are ignored and a trailing comma is allowed.

        Returns:
            ListLiteral: The parsed list.
        """
        line = self.parser.consume(TokenType.LBRACKET).line
        self.parser.skip_newlines()

        elements: List[Value] = []
        while self.parser.current().token_type != TokenType.RBRACKET:
            elements.append(self.parse_value())
            self.parser.skip_newlines()

            if self.parser.current().token_type != TokenType.COMMA:
                break  # No comma, so the list must close here
            self.parser.consume(TokenType.COMMA)
            self.parser.skip_newlines()  # Allows a trailing comma before `]`

        self.parser.consume(TokenType.RBRACKET)

        return ListLiteral(elements, line)

    def parse_span_literal(self, start: NumberLiteral) -> SpanLiteral:
        """Parses `to <stop> by <step>` after the start of a span.

        Args:
            start (NumberLiteral): The already parsed start.

        Returns:
            SpanLiteral: The parsed span.
        """
        self.parser.consume(TokenType.TO)
        stop = self.parse_number_operand()
        self.parser.consume(TokenType.BY)
        step = self.parse_number_operand()

        return SpanLiteral(start, stop, step, start.line)

    def parse_number_operand(self) -> NumberLiteral:
        token = self.parser.current()
        if not token.is_number:
            raise SyntaxError(
                f"Span bounds must be numbers, got {token.value!r} on line {token.line}"
            )

        return self.parse_number()
