"""Bundled TSS fixtures."""

from importlib import resources

from ..syntax import parse_tss
from ..terms import Tss


def names() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files(__package__).iterdir()
                  if p.name.endswith(".tss"))


def text(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.tss").read_text()


def load(name: str) -> Tss:
    return parse_tss(text(name))
