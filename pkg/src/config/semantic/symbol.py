from typing import Any, Dict, Optional
from config.semantic.types import ValueType
from config.semantic.typing import ScopeABC, SymbolABC, SymbolTableABC


class Symbol(SymbolABC):
    """
    Represents a resolved config key.

    Attributes:
        name (str): The key.
        value_type (ValueType): The inferred type of the value.
        value (Any): The evaluated Python value.
        line (int): The line of the entry.
    """

    def __init__(self, name: str, value_type: ValueType, value: Any, line: int) -> None:
        self.name = name
        self.value_type = value_type
        self.value = value
        self.line = line

    def __repr__(self) -> str:
        return (
            f"Symbol(name={self.name}, value_type={self.value_type}, "
            f"value={self.value!r})"
        )


class Scope(ScopeABC):
    """
    Represents the scope of one section.

    Attributes:
        name (str): The section name.
        line (int): The line of the section header.
        symbols (Dict[str, SymbolABC]): The keys defined in the section.
    """

    def __init__(self, name: str, line: int = 0) -> None:
        self.name = name
        self.line = line
        self.symbols: Dict[str, SymbolABC] = {}

    def __repr__(self) -> str:
        return f"Scope(name={self.name}, symbols={self.symbols})"


class SymbolTable(SymbolTableABC):
    """
    Holds the resolved keys of a config file, scoped by section.

    Attributes:
        scopes (Dict[str, ScopeABC]): Section scopes in file order.
        current (Optional[ScopeABC]): The section being analysed.
    """

    def __init__(self) -> None:
        self.scopes: Dict[str, ScopeABC] = {}
        self.current: Optional[ScopeABC] = None

    def enter_scope(self, name: str, line: int = 0) -> None:
        """Opens the scope of a section.

        Raises:
            KeyError: If the section was already defined.
        """
        if name in self.scopes:
            raise KeyError(f"Section [{name}] already defined")

        self.current = Scope(name, line)
        self.scopes[name] = self.current

    def exit_scope(self) -> None:
        """Closes the current section scope.

        Raises:
            IndexError: If no section is open.
        """
        if self.current is None:
            raise IndexError("No section scope to exit")

        self.current = None

    def define(
        self, name: str, value_type: ValueType, value: Any, line: int = 0
    ) -> None:
        """Adds a key to the current section.

        Raises:
            IndexError: If no section is open.
            KeyError: If the key is already defined in the section.
        """
        if self.current is None:
            raise IndexError("Cannot define a key outside a section")
        if name in self.current.symbols:
            raise KeyError(f"Key {name} already defined in [{self.current.name}]")

        self.current.symbols[name] = Symbol(name, value_type, value, line)

    def lookup(self, section: str, name: str) -> Optional[SymbolABC]:
        """Looks up a key of a section.

        Returns:
            Optional[SymbolABC]: The symbol if defined, otherwise None.
        """
        scope = self.scopes.get(section)
        if scope is None:
            return None

        return scope.symbols.get(name)

    def section_line(self, section: str) -> int:
        """Line of a section header, 0 if the section is absent."""
        scope = self.scopes.get(section)
        return scope.line if scope is not None else 0

    def as_dict(self) -> Dict[str, Dict[str, Any]]:
        """The resolved config as plain nested dictionaries."""
        return {
            name: {key: symbol.value for key, symbol in scope.symbols.items()}
            for name, scope in self.scopes.items()
        }
