"""Access to the shipped scene corpus."""

from __future__ import annotations

from importlib import resources

_PKG = "eraserbench.scenes"


def names() -> list[str]:
    out = []
    for entry in resources.files(_PKG).iterdir():
        if entry.name.endswith(".bench"):
            out.append(entry.name[: -len(".bench")])
    return sorted(out)


def load(name: str) -> str:
    """Scene text by name (without the .bench suffix)."""
    path = resources.files(_PKG) / f"{name}.bench"
    if not path.is_file():
        known = ", ".join(names())
        raise KeyError(f"unknown scene {name!r}; shipped scenes: {known}")
    return path.read_text()
