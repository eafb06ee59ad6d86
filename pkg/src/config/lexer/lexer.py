from typing import Generator, Optional
import re
from config.lexer.tokens import TokenType, spec
from config.lexer.token import Token


class Lexer:
    """
    The Lexer converts the text of a config file into a stream of tokens.
    Config files are line oriented, so newlines are emitted as tokens;
    gaps and comments are dropped.

    Attributes:
        code (str): The source text to be tokenised.
        line (int): The current line number being processed.
        column (int): The current column number being processed.
        pos (int): The current position in the source text.
    """

    def __init__(self, code: str) -> None:
        """Initialises the Lexer with the source text.

        Args:
            code (str): The source text to be tokenised.
        """
        self.code: str = code
        self.line: int = 1
        self.column: int = 1
        self.pos: int = 0

    def tokenize(self) -> Generator[Token, None, None]:
        """Tokenises the source text into a sequence of tokens.

        Yields:
            Token: The next token in the source text.

        Raises:
            SyntaxError: If an invalid character is encountered.
        """
        # One alternation of named groups, tried in the order of the token table
        regex: str = "|".join(f"(?P<{pair[0].name}>{pair[1]})" for pair in spec)
        get_token = re.compile(regex).match  # Anchored at the given position
        mo: Optional[re.Match[str]] = get_token(self.code, self.pos)

        while mo is not None:
            token_type: Optional[str] = mo.lastgroup  # Name of the group that matched

            if token_type is None:
                raise SyntaxError(f"Invalid token on line {self.line}")

            value: str = mo.group(token_type)

            match TokenType[token_type]:
                case TokenType.DOUBLE_QUOTE | TokenType.SINGLE_QUOTE:
                    yield from self._match_string(token_type, value)
                    mo = get_token(self.code, self.pos)  # pos already past the string
                    continue
                case TokenType.NEWLINE:
                    yield Token(TokenType.NEWLINE, value, self.line, self.column)
                    self.line += 1
                    self.column = 1  # Columns count from 1 on every line
                case TokenType.GAP | TokenType.EOL_COMMENT:
                    self.column += len(value)  # Dropped, but still advances the column
                case TokenType.MISMATCH:  # Catch-all, last in the token table
                    raise SyntaxError(f"{value} unexpected on line {self.line}")
                case _:
                    yield Token(TokenType[token_type], value, self.line, self.column)
                    self.column += len(value)

            self.pos = mo.end()
            mo = get_token(self.code, self.pos)

        yield Token(TokenType.EOF, "", self.line, self.column)  # Parser sentinel

    def _match_string(
        self, token_type: str, value: str
    ) -> Generator[Token, None, None]:
        """Handles the tokenization of a quoted string, which must close on
        the line it opens.

        Args:
            token_type (str): The type of the quote token (single or double).
            value (str): The opening quote character.

        Yields:
            Token: The opening quote, the string literal and the closing quote.

        Raises:
            SyntaxError: If the string is not closed before the end of the line.
        """
        quote_type = value

        yield Token(TokenType[token_type], value, self.line, self.column)

        self.pos += 1  # Step over the opening quote
        self.column += 1

        start_pos = self.pos
        start_col = self.column
        while self.pos < len(self.code) and self.code[self.pos] != "\n":
            # A quote preceded by a backslash does not close the string
            if self.code[self.pos] == quote_type and self.code[self.pos - 1] != "\\":
                break

            self.column += 1
            self.pos += 1

        if self.pos == len(self.code) or self.code[self.pos] == "\n":
            raise SyntaxError(f"Unterminated string literal on line {self.line}")

        yield Token(
            TokenType.STRING_LITERAL,
            self.code[start_pos : self.pos],
            self.line,
            start_col,
        )
        yield Token(TokenType[token_type], value, self.line, self.column)

        self.pos += 1
        self.column += 1
