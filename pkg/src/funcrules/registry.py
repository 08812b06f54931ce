"""Comprehensive functions and the registry that names them."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, ValidationError
from .expression import Expr, Var, as_expr, free_variables, fn_symbols, parse, substitute

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class ComprehensiveFunction:
    """A named symbolic function with ordered parameters.

    ``display_name`` is the phrase used when a rule is put into words.
    """

    name: str
    display_name: str
    params: tuple[str, ...]
    body: Expr

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if not _IDENT_RE.fullmatch(self.name):
            raise ValidationError(f"invalid function name {self.name!r}")
        if not self.params:
            raise ValidationError(f"function {self.name!r} needs at least one parameter")
        if len(set(self.params)) != len(self.params):
            raise ValidationError(f"function {self.name!r} has repeated parameters")
        extra = free_variables(self.body) - set(self.params)
        if extra:
            raise ValidationError(
                f"function {self.name!r} uses unbound variable(s) {', '.join(sorted(extra))}"
            )
        if fn_symbols(self.body):
            raise ValidationError(f"function {self.name!r} body may not contain function symbols")

    @property
    def arity(self) -> int:
        return len(self.params)

    def instantiate(self, args: Sequence) -> Expr:
        """Substitute ``args[i]`` for ``params[i]`` in the body."""
        if len(args) != self.arity:
            raise ValidationError(
                f"{self.name} takes {self.arity} argument(s), got {len(args)}"
            )
        mapping = {Var(p): as_expr(a) for p, a in zip(self.params, args)}
        return substitute(self.body, mapping)


class Registry:
    """Insertion-ordered mapping of name to :class:`ComprehensiveFunction`."""

    def __init__(self, functions: Iterable[ComprehensiveFunction] = ()):
        self._functions: dict[str, ComprehensiveFunction] = {}
        for fc in functions:
            self.add(fc)

    def add(self, fc: ComprehensiveFunction) -> None:
        if fc.name in self._functions:
            raise ValidationError(f"function {fc.name!r} is already defined")
        self._functions[fc.name] = fc

    def define(self, name: str, display_name: str, params: Sequence[str], body: str | Expr) -> ComprehensiveFunction:
        if name in self._functions:
            raise ValidationError(f"function {name!r} is already defined")
        if isinstance(body, str):
            body = parse(body)
        fc = ComprehensiveFunction(name, display_name, tuple(params), body)
        self.add(fc)
        return fc

    def copy(self) -> Registry:
        return Registry(self._functions.values())

    def __getitem__(self, name: str) -> ComprehensiveFunction:
        try:
            return self._functions[name]
        except KeyError:
            raise ValidationError(f"unknown function {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._functions

    def __iter__(self) -> Iterator[ComprehensiveFunction]:
        return iter(self._functions.values())

    def __len__(self) -> int:
        return len(self._functions)

    def names(self) -> list[str]:
        return list(self._functions)


BUILTINS = (
    ("V", "cubic volume", ("s",), "s^3"),
    ("T", "trigonometry identity", ("a",), "sin(a)^2 + cos(a)^2"),
    ("F", "force", ("m", "a"), "m*a"),
    ("Q", "quadratic relationship", ("a", "b", "c"), "(-b +- sqrt(b^2 - 4*a*c)) / (2*a)"),
)


def builtin_registry() -> Registry:
    """Registry holding the cube volume V, trig identity T, force F and
    quadratic formula Q."""
    reg = Registry()
    for name, display, params, body in BUILTINS:
        reg.define(name, display, params, body)
    return reg


def define(reg: Registry, name: str, display_name: str, params: Sequence[str], body_text: str) -> Registry:
    """Return a copy of ``reg`` extended with one function."""
    out = reg.copy()
    out.define(name, display_name, params, body_text)
    return out


def instantiate(fc: ComprehensiveFunction, args: Sequence) -> Expr:
    return fc.instantiate(args)


_DEF_RE = re.compile(
    r"""\s*(?P<name>[A-Za-z][A-Za-z0-9_]*)
        \s+"(?P<display>[^"]*)"
        \s*\((?P<params>[^)]*)\)
        \s*=\s*(?P<body>.+?)\s*$""",
    re.VERBOSE,
)


def parse_functions(text: str) -> list[ComprehensiveFunction]:
    """Parse a function definition file.

    One definition per line: ``name "display name" (p1, p2) = body``.
    ``#`` starts a comment.
    """
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _DEF_RE.fullmatch(line)
        if m is None:
            raise ParseError("malformed function definition", lineno, 1)
        params = [p.strip() for p in m.group("params").split(",") if p.strip()]
        for p in params:
            if not _IDENT_RE.fullmatch(p):
                raise ParseError(f"invalid parameter name {p!r}", lineno, m.start("params") + 1)
        try:
            body = parse(m.group("body"))
        except ParseError as err:
            raise ParseError(f"in body of {m.group('name')}: {err}", lineno, m.start("body") + err.column) from None
        out.append(ComprehensiveFunction(m.group("name"), m.group("display"), tuple(params), body))
    return out


def load_functions(path: str | Path, reg: Registry | None = None) -> Registry:
    """Read a definition file and add its functions to a copy of ``reg``
    (the builtin registry by default)."""
    out = (reg or builtin_registry()).copy()
    for fc in parse_functions(Path(path).read_text(encoding="utf-8")):
        out.add(fc)
    return out


def format_function(fc: ComprehensiveFunction) -> str:
    from .expression import render

    return f'{fc.name} "{fc.display_name}" ({", ".join(fc.params)}) = {render(fc.body, "machine", canonical=False)}'
