from config.lexer.lexer import Lexer
from config.parser.parser import Parser
from config.syntax.ast import *


def parse_code(code: str) -> ConfigFile:
    lexer = Lexer(code)
    tokens = list(lexer.tokenize())
    parser = Parser(tokens)
    return parser.parse()


def check(code: str, expected: ConfigFile):
    config = parse_code(code)
    assert repr(config) == repr(expected)


def test_empty_file():
    check("", ConfigFile([]))
    check("# only a comment\n\n", ConfigFile([]))


def test_section_with_entries():
    code = """
        [experiment]
        scheme = rwsc
        mode = optimize
    """
    expected = ConfigFile(
        [
            Section(
                "experiment",
                [
                    Entry("scheme", WordLiteral("rwsc")),
                    Entry("mode", WordLiteral("optimize")),
                ],
            )
        ]
    )
    check(code, expected)


def test_empty_section():
    code = "[space]\n[initial]\nnbar0 = 1.0"
    expected = ConfigFile(
        [
            Section("space", []),
            Section("initial", [Entry("nbar0", NumberLiteral(1.0))]),
        ]
    )
    check(code, expected)


def test_numbers():
    code = "[params]\ndelta = -0.891\nomega = 1e-3\nhorizon = 400"
    expected = ConfigFile(
        [
            Section(
                "params",
                [
                    Entry("delta", NumberLiteral(-0.891)),
                    Entry("omega", NumberLiteral(0.001)),
                    Entry("horizon", NumberLiteral(400)),
                ],
            )
        ]
    )
    check(code, expected)


def test_boolean_and_string():
    code = "[evolve]\nfit = false\n[output]\npath = 'out/run'"
    expected = ConfigFile(
        [
            Section("evolve", [Entry("fit", BooleanLiteral(False))]),
            Section("output", [Entry("path", StringLiteral("out/run"))]),
        ]
    )
    check(code, expected)


def test_list():
    code = "[control]\nhorizons = [100, 250, 400.5]"
    expected = ConfigFile(
        [
            Section(
                "control",
                [
                    Entry(
                        "horizons",
                        ListLiteral(
                            [
                                NumberLiteral(100),
                                NumberLiteral(250),
                                NumberLiteral(400.5),
                            ]
                        ),
                    )
                ],
            )
        ]
    )
    check(code, expected)


def test_nested_multiline_list_with_trailing_comma():
    code = """
        [control]
        starts = [
            [-1.0, 0.3],
            [-0.9, 0.45],
        ]
    """
    expected = ConfigFile(
        [
            Section(
                "control",
                [
                    Entry(
                        "starts",
                        ListLiteral(
                            [
                                ListLiteral([NumberLiteral(-1.0), NumberLiteral(0.3)]),
                                ListLiteral([NumberLiteral(-0.9), NumberLiteral(0.45)]),
                            ]
                        ),
                    )
                ],
            )
        ]
    )
    check(code, expected)


def test_empty_list():
    check(
        "[control]\nstarts = []",
        ConfigFile([Section("control", [Entry("starts", ListLiteral([]))])]),
    )


def test_span():
    code = "[scan]\ngrid = -1.1 to -0.6 by 0.01"
    expected = ConfigFile(
        [
            Section(
                "scan",
                [
                    Entry(
                        "grid",
                        SpanLiteral(
                            NumberLiteral(-1.1),
                            NumberLiteral(-0.6),
                            NumberLiteral(0.01),
                        ),
                    )
                ],
            )
        ]
    )
    check(code, expected)


def test_span_inside_list():
    code = "[scan]\ngrid = [0, 10 to 30 by 10]"
    expected = ConfigFile(
        [
            Section(
                "scan",
                [
                    Entry(
                        "grid",
                        ListLiteral(
                            [
                                NumberLiteral(0),
                                SpanLiteral(
                                    NumberLiteral(10),
                                    NumberLiteral(30),
                                    NumberLiteral(10),
                                ),
                            ]
                        ),
                    )
                ],
            )
        ]
    )
    check(code, expected)


def test_lines_are_recorded():
    config = parse_code("\n[scan]\n\nparam = delta\n")
    section = config.sections[0]
    assert section.line == 2
    assert section.entries[0].line == 4
    assert section.entries[0].value.line == 4
