from typing import List
from config.lexer.token import Token
from config.lexer.tokens import TokenType
from config.parser.typing import ParserABC
from config.parser.values import ValueParser
from config.syntax.ast import ConfigFile, Entry, Section


class Parser(ParserABC):
    """
    The Parser class parses a list of config tokens into an
    abstract syntax tree (AST).

    Attributes:
        tokens (List[Token]): The list of tokens to be parsed.
        pos (int): The current position in the token list.
        value_parser (ValueParser): Parser for the right-hand side of entries.
    """

    def __init__(self, tokens: List[Token]) -> None:
        """Initialises the Parser with a token list and creates a value parser.

        Args:
            tokens (List[Token]): The list of tokens to be parsed.
        """
        self.tokens = tokens
        self.pos = 0  # Index of the current token
        self.value_parser = ValueParser(self)  # Shares pos through this parser

    def parse(self) -> ConfigFile:
        """Parses the tokens into a ConfigFile AST node.

        Returns:
            ConfigFile: The root node of the parsed AST.

        Raises:
            SyntaxError: If an entry appears before the first section.
        """
        sections: List[Section] = []

        self.skip_newlines()  # Blank lines and comments before the first header
        while not self.is_eof():
            if self.current().token_type != TokenType.LBRACKET:
                token = self.current()
                raise SyntaxError(
                    f"Expected a [section] header, but got {token.value!r} "
                    f"on line {token.line}"
                )
            sections.append(self.parse_section())

        return ConfigFile(sections)

    def parse_section(self) -> Section:
        """Parses a section header followed by its entries.

        Returns:
            Section: The parsed section.
        """
        line = self.consume(TokenType.LBRACKET).line
        name = self.consume(TokenType.IDENTIFIER).value
        self.consume(TokenType.RBRACKET)
        self.end_line()  # A header stands alone on its line

        entries: List[Entry] = []
        # Entries run until the next header or EOF
        while self.current().token_type == TokenType.IDENTIFIER:
            entries.append(self.parse_entry())

        return Section(name, entries, line)

    def parse_entry(self) -> Entry:
        """Parses `<key> = <value>` up to the end of the line.

        Returns:
            Entry: The parsed entry.
        """
        key = self.consume(TokenType.IDENTIFIER)
        self.consume(TokenType.ASSIGN)
        value = self.value_parser.parse_value()
        self.end_line()

        return Entry(key.value, value, key.line)  # Errors cite the key's line

    def end_line(self) -> None:
        """Consumes the newline(s) ending a header or entry."""
        if self.is_eof():
            return  # The last line may lack a newline
        self.consume(TokenType.NEWLINE)
        self.skip_newlines()

    def skip_newlines(self) -> None:
        """Consumes any run of newline tokens."""
        while self.current().token_type == TokenType.NEWLINE:
            self.pos += 1

    def consume(self, token_type: TokenType) -> Token:
        """Consumes the current token if it matches
        the expected type, otherwise raises an error.

        Args:
            token_type (TokenType): The expected type of the current token.

        Returns:
            Token: The consumed token.

        Raises:
            SyntaxError: If the current token type does not match the expected type.
        """
        token = self.current()
        if token.token_type != token_type:
            raise SyntaxError(
                f"Expected token {token_type}, but got {token.token_type} "
                f"on line {token.line}"
            )
        self.pos += 1

        return token

    def current(self) -> Token:
        """Retrieves the token at the current position.

        Returns:
            Token: The current token.

        Raises:
            RuntimeError: If the end of the token list is overrun.
        """
        if self.pos >= len(self.tokens):
            raise RuntimeError("End of file reached")

        return self.tokens[self.pos]

    def is_eof(self) -> bool:
        """Checks if the current token is the end-of-file token.

        Returns:
            bool: True if the current token is EOF, otherwise False.
        """
        return self.current().token_type == TokenType.EOF
