"""The bundled library: equivalences, the equivalence axiom and the classical axioms."""

from __future__ import annotations

from importlib import resources

from .checker import Checker, GlobalEntry, Judgment

AXIOMS = ("univalence", "excluded_middle", "contractible_choice")


def library_source() -> str:
    return resources.files("univalent.kernel").joinpath("univalence.tt").read_text(encoding="utf-8")


def load_library(checker: Checker | None = None) -> Checker:
    checker = checker or Checker()
    checker.load(library_source())
    return checker


def univalence_library() -> list[Judgment]:
    """Every library entry as a checked closed judgment ``|- name : type``."""
    checker = load_library()
    from .syntax import Const

    return [Judgment((), Const(e.name), e.type) for e in checker.glob.entries.values()]


def entries(checker: Checker) -> list[GlobalEntry]:
    return list(checker.glob.entries.values())
