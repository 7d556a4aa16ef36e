"""Shared helpers for the test suite."""

from pathlib import Path

from chrkit.syntax import parse_program

FIXTURES = Path(__file__).parent / "fixtures"


def load(name):
    """Parse tests/fixtures/<name>.chr."""
    return parse_program((FIXTURES / f"{name}.chr").read_text())


def rule_named(program, name):
    for i, r in enumerate(program.rules):
        if r.name == name:
            return i, r
    raise KeyError(name)
