"""Bundled example documents, addressable by bare name from the CLI."""

from __future__ import annotations

import os
from importlib import resources

from .document import CdgaDocument, parse
from .graded import InputError


def corpus_names() -> list[str]:
    root = resources.files("cdgatools") / "corpus_data"
    return sorted(
        entry.name[: -len(".cdga")]
        for entry in root.iterdir()
        if entry.name.endswith(".cdga")
    )


def corpus_text(name: str) -> str:
    path = resources.files("cdgatools") / "corpus_data" / f"{name}.cdga"
    if not path.is_file():
        known = ", ".join(corpus_names())
        raise InputError(f"no corpus document {name!r}; available: {known}")
    return path.read_text(encoding="utf-8")


def load_corpus(name: str) -> CdgaDocument:
    return parse(corpus_text(name), name=name)


def resolve_document(arg: str) -> CdgaDocument:
    """A path to a .cdga file, or the bare name of a corpus document."""
    if arg.endswith(".cdga") or os.path.sep in arg or os.path.isfile(arg):
        if not os.path.isfile(arg):
            raise InputError(f"no such file: {arg}")
        with open(arg, "r", encoding="utf-8") as fh:
            text = fh.read()
        stem = os.path.splitext(os.path.basename(arg))[0]
        return parse(text, name=stem)
    return load_corpus(arg)
