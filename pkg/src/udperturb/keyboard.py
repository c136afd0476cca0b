"""Language-specific keyboard layouts as staggered key grids.

A layout is a list of rows, each with a horizontal offset in key-width
units; the position of a key is ``(row_index, offset + column_index)``.
Two keys are adjacent when their rows differ by at most one and their
horizontal centers by at most one key width. Only the base (lowercase)
layer is modeled; the attack engine handles letter case.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_ADJACENCY_EPS = 1e-9

# The treebank languages covered by the bundled layouts. Languages whose
# national layout does not differ materially at the letter level fall back
# to US QWERTY.
LANGUAGE_LAYOUTS = {
    "af": "qwerty-us",
    "en": "qwerty-us",
    "eu": "qwerty-es",
    "de": "qwertz-de",
    "es": "qwerty-es",
    "fi": "qwerty-fise",
    "ga": "qwerty-us",
    "hu": "qwertz-hu",
    "id": "qwerty-us",
    "lt": "qwerty-us",
    "mt": "qwerty-us",
    "pl": "qwerty-us",
    "sv": "qwerty-fise",
    "tr": "qwerty-tr",
}


class LayoutFormatError(ValueError):
    """Malformed layout file."""


@dataclass
class KeyRow:
    offset: float
    keys: list[str]


@dataclass
class KeyboardLayout:
    name: str
    rows: list[KeyRow]
    alphabet: frozenset[str]

    def positions(self) -> dict[str, tuple[int, float]]:
        out = {}
        for row_index, row in enumerate(self.rows):
            for column, key in enumerate(row.keys):
                out[key] = (row_index, row.offset + column)
        return out


def load_layout(text: str) -> KeyboardLayout:
    """Parse a layout file (see README for the format).

    Raises :class:`LayoutFormatError` for duplicate characters, empty rows,
    or malformed lines.
    """
    name = None
    rows: list[KeyRow] = []
    seen: set[str] = set()
    for line_number, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(None, 1)
        if fields[0] == "name":
            if len(fields) != 2:
                raise LayoutFormatError(f"line {line_number}: missing layout name")
            name = fields[1].strip()
        elif fields[0] == "row":
            if name is None:
                raise LayoutFormatError(
                    f"line {line_number}: the 'name' line must come before rows"
                )
            if len(fields) != 2:
                raise LayoutFormatError(f"line {line_number}: empty row")
            offset_s, _, keys_s = fields[1].partition(" ")
            try:
                offset = float(offset_s)
            except ValueError:
                raise LayoutFormatError(
                    f"line {line_number}: bad row offset {offset_s!r}"
                ) from None
            if offset < 0:
                raise LayoutFormatError(f"line {line_number}: negative row offset")
            keys = list(keys_s.strip())
            if not keys:
                raise LayoutFormatError(f"line {line_number}: empty row")
            for key in keys:
                if key in seen:
                    raise LayoutFormatError(
                        f"line {line_number}: duplicate character {key!r}"
                    )
                seen.add(key)
            rows.append(KeyRow(offset=offset, keys=keys))
        else:
            raise LayoutFormatError(
                f"line {line_number}: unknown directive {fields[0]!r}"
            )
    if name is None:
        raise LayoutFormatError("layout file has no 'name' line")
    if not rows:
        raise LayoutFormatError("layout file has no rows")
    return KeyboardLayout(name=name, rows=rows, alphabet=frozenset(seen))


def adjacent_keys(layout: KeyboardLayout, c: str) -> set[str]:
    """All keys neighboring ``c`` on the grid (empty set if ``c`` absent).

    ``c`` is lowercased for the lookup. Neighbors satisfy
    ``|row_delta| <= 1`` and ``|x_delta| <= 1.0`` key widths.
    """
    positions = layout.positions()
    c = c.lower()
    if c not in positions:
        return set()
    row0, x0 = positions[c]
    return {
        key
        for key, (row, x) in positions.items()
        if key != c and abs(row - row0) <= 1 and abs(x - x0) <= 1.0 + _ADJACENCY_EPS
    }


def bundled_layout_names() -> list[str]:
    files = resources.files("udperturb").joinpath("layouts")
    return sorted(
        entry.name[: -len(".layout")]
        for entry in files.iterdir()
        if entry.name.endswith(".layout")
    )


def get_layout(name_or_path: str) -> KeyboardLayout:
    """Resolve a layout by bundled name, language code, or file path."""
    key = name_or_path.lower()
    key = LANGUAGE_LAYOUTS.get(key, key)
    resource = resources.files("udperturb").joinpath("layouts", f"{key}.layout")
    if resource.is_file():
        return load_layout(resource.read_text(encoding="utf-8"))
    path = Path(name_or_path)
    if path.is_file():
        return load_layout(path.read_text(encoding="utf-8"))
    raise LayoutFormatError(
        f"unknown layout {name_or_path!r}; bundled: {', '.join(bundled_layout_names())}"
    )
