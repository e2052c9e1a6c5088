"""Bundled gallery of small complexes used by tests and the CLI.

Every complex, precubical set and cellular map that the tool's examples
refer to by name ships here as a text source; ``load`` parses fresh
copies, so callers may decorate the returned objects with caches freely.
"""

from importlib import resources

from ..errors import UnknownCell
from ..gcomplex import (
    CellularMap,
    GlobularComplex,
    PrecubicalSet2,
    parse_cmap,
    parse_gcx,
    parse_pcx,
)

GALLERY = (
    "FIX-EDGE",
    "FIX-EDGE-split",
    "FIX-B",
    "FIX-A",
    "FIX-SQUARE",
    "FIX-HOLLOW",
    "FIX-TWOCELLS",
    "FIX-LOOPCELL",
)


def _read(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text()


def source_path(filename: str):
    """Filesystem path of a gallery source file."""
    return resources.files(__package__).joinpath(filename)


def load(name: str) -> GlobularComplex:
    """Parse a gallery complex by its fixture name."""
    if name not in GALLERY:
        raise UnknownCell(f"no gallery complex named {name}")
    return parse_gcx(_read(f"{name}.gcx"), name)


def load_pcx(name: str) -> PrecubicalSet2:
    return parse_pcx(_read(f"{name}.pcx"), name)


def crush_a_to_b() -> CellularMap:
    """The cellular map FIX-A -> FIX-B collapsing the filled route."""
    return parse_cmap(_read("crush.cmap"), load("FIX-A"), load("FIX-B"))
