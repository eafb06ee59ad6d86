from dataclasses import dataclass
from config.lexer.tokens import TokenType

NUMBER_TOKENS = (TokenType.INT_LITERAL, TokenType.FLOAT_LITERAL)


@dataclass(frozen=True)
class Token:
    """A lexeme of a config file and where it starts (1-based line and column)."""

    token_type: TokenType
    value: str
    line: int
    column: int

    @property
    def is_number(self) -> bool:
        return self.token_type in NUMBER_TOKENS

    def __repr__(self) -> str:
        return f"Token({self.token_type}, {self.value!r}, {self.line}, {self.column})"
