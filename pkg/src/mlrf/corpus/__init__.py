"""Bundled example loops (``.slc`` files)."""

from importlib import resources

from ..parser import LoopFile, parse_loop_file


def names() -> list:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".slc"))


def text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.slc").read_text()


def load(name: str) -> LoopFile:
    return parse_loop_file(text(name))
