from enum import Enum, auto


class TokenType(Enum):
    """Enum class representing the tokens of the experiment-config language."""

    # Keywords
    TO = auto()  # "to"
    BY = auto()  # "by"

    # Identifiers
    IDENTIFIER = auto()

    # Delimiters
    LBRACKET = auto()  # "["
    RBRACKET = auto()  # "]"
    COMMA = auto()  # ","
    ASSIGN = auto()  # "="

    # Literals
    INT_LITERAL = auto()
    FLOAT_LITERAL = auto()
    BOOLEAN_LITERAL = auto()
    STRING_LITERAL = auto()

    # String delimiters
    DOUBLE_QUOTE = auto()  # '"'
    SINGLE_QUOTE = auto()  # '\''

    # Comments
    EOL_COMMENT = auto()  # "# ..."

    # End of file
    EOF = auto()

    # Other
    GAP = auto()
    NEWLINE = auto()
    MISMATCH = auto()


spec = (
    (TokenType.TO, r"\bto\b"),
    (TokenType.BY, r"\bby\b"),
    (TokenType.LBRACKET, r"\["),
    (TokenType.RBRACKET, r"\]"),
    (TokenType.COMMA, r","),
    (TokenType.ASSIGN, r"="),
    (TokenType.EOL_COMMENT, r"\#[^\n]*"),
    (TokenType.BOOLEAN_LITERAL, r"\btrue\b|\bfalse\b"),
    (
        TokenType.FLOAT_LITERAL,
        r"[-+]?(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?\d+[eE][-+]?\d+",
    ),
    (TokenType.INT_LITERAL, r"[-+]?\d+"),
    (TokenType.DOUBLE_QUOTE, r'"'),
    (TokenType.SINGLE_QUOTE, r"\'"),
    (TokenType.IDENTIFIER, r"[A-Za-z_]\w*"),
    (TokenType.GAP, r"[ \t\r]+"),
    (TokenType.NEWLINE, r"\n"),
    (TokenType.MISMATCH, r"."),
)
