"""2-planar bracketing codec for dependency trees.

Each token gets a label made of bracket symbols plus its relation, turning
parsing into sequence labeling. Arcs from the virtual root are encoded as
the absence of an incoming marker. Symbols:

    ``<``  incoming arc from the right (this token's head lies rightward)
    ``\\``  outgoing arc to the left (one per left dependent)
    ``/``  outgoing arc to the right (one per right dependent)
    ``>``  incoming arc from the left

A trailing ``*`` puts a symbol on the second plane. Within a label the
groups appear in that canonical order, unstarred before starred. Decoding
scans left to right with two stacks per plane; it is total: unmatched
symbols are discarded, headless tokens attach to the root, and cycles are
repaired, so arbitrary predicted label sequences always yield a tree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conllu import Sentence, validate_tree

_SYMBOLS = ("<", "\\", "/", ">")


class NotATreeError(ValueError):
    """Head links do not form a tree."""


class NotTwoPlanarError(ValueError):
    """The tree's arcs cannot be split into two non-crossing planes."""


@dataclass
class PlaneAssignment:
    plane_of_arc: dict[int, int]  # dependent id -> 1 | 2
    is_two_planar: bool


@dataclass
class BracketLabel:
    brackets: str
    deprel: str


def _crosses(a: tuple[int, int], b: tuple[int, int]) -> bool:
    # Exactly one endpoint of one arc lies strictly inside the other;
    # shared endpoints never cross.
    (l1, r1), (l2, r2) = a, b
    return l1 < l2 < r1 < r2 or l2 < l1 < r2 < r1


def assign_planes(sentence: Sentence) -> PlaneAssignment:
    """Greedy plane assignment, processing arcs by right endpoint.

    Each non-root arc goes to plane 1 unless it crosses an arc already
    there, else to plane 2; if it crosses both planes the sentence is not
    2-planar under this (standard) greedy order.
    """
    report = validate_tree(sentence)
    if not report.is_tree:
        raise NotATreeError(
            f"cycle through tokens {report.cycle_members}; cannot assign planes"
        )
    arcs = [
        (min(t.id, t.head), max(t.id, t.head), t.id)
        for t in sentence.tokens
        if t.head != 0
    ]
    arcs.sort(key=lambda a: (a[1], a[0]))
    plane_of_arc: dict[int, int] = {}
    spans: dict[int, list[tuple[int, int]]] = {1: [], 2: []}
    two_planar = True
    for left, right, dependent in arcs:
        span = (left, right)
        for plane in (1, 2):
            if not any(_crosses(span, other) for other in spans[plane]):
                plane_of_arc[dependent] = plane
                spans[plane].append(span)
                break
        else:
            two_planar = False
    return PlaneAssignment(plane_of_arc=plane_of_arc, is_two_planar=two_planar)


def _symbol(base: str, plane: int) -> str:
    return base + "*" if plane == 2 else base


def encode_2planar(sentence: Sentence) -> list[BracketLabel]:
    """Linearize a 2-planar tree into one label per token.

    Raises :class:`NotATreeError` / :class:`NotTwoPlanarError` when the
    sentence violates the codec's preconditions.
    """
    assignment = assign_planes(sentence)
    if not assignment.is_two_planar:
        raise NotTwoPlanarError("arcs do not fit on two non-crossing planes")
    incoming = {t.id: "" for t in sentence.tokens}
    out_left: dict[int, list[int]] = {t.id: [] for t in sentence.tokens}
    out_right: dict[int, list[int]] = {t.id: [] for t in sentence.tokens}
    for token in sentence.tokens:
        if token.head == 0:
            continue
        plane = assignment.plane_of_arc[token.id]
        if token.head > token.id:
            incoming[token.id] = _symbol("<", plane)
            out_left[token.head].append(plane)
        else:
            incoming[token.id] = _symbol(">", plane)
            out_right[token.head].append(plane)
    labels = []
    for token in sentence.tokens:
        parts = []
        if incoming[token.id].startswith("<"):
            parts.append(incoming[token.id])
        parts.extend(_symbol("\\", p) for p in sorted(out_left[token.id]))
        parts.extend(_symbol("/", p) for p in sorted(out_right[token.id]))
        if incoming[token.id].startswith(">"):
            parts.append(incoming[token.id])
        labels.append(BracketLabel(brackets="".join(parts), deprel=token.deprel))
    return labels


def parse_brackets(brackets: str) -> list[tuple[str, int]]:
    """Split a bracket string into ``(symbol, plane)`` pairs.

    Tolerant by design: unknown characters and stray stars are skipped so
    that decoding stays total.
    """
    out = []
    for ch in brackets:
        if ch in _SYMBOLS:
            out.append((ch, 1))
        elif ch == "*" and out:
            out[-1] = (out[-1][0], 2)
    return out


def decode_2planar(labels: list[BracketLabel]) -> tuple[list[int], list[str]]:
    """Rebuild ``(heads, deprels)`` from any label sequence.

    Within a token, arc-closing symbols (``>``, ``\\``) act before
    arc-opening ones (``<``, ``/``); a closing symbol with nothing to close
    is discarded. Afterwards headless tokens attach to the root (the first
    gets relation "root") and each remaining cycle is broken by re-attaching
    its smallest member to the root.
    """
    n = len(labels)
    heads: list[int | None] = [None] * (n + 1)
    pending_sources = {1: [], 2: []}  # "/" waiting for ">"
    pending_dependents = {1: [], 2: []}  # "<" waiting for "\"
    for i in range(1, n + 1):
        symbols = parse_brackets(labels[i - 1].brackets)
        for ch, plane in symbols:
            if ch == ">" and heads[i] is None and pending_sources[plane]:
                heads[i] = pending_sources[plane].pop()
            elif ch == "\\" and pending_dependents[plane]:
                heads[pending_dependents[plane].pop()] = i
        pushed = False
        for ch, plane in symbols:
            if ch == "/":
                pending_sources[plane].append(i)
            elif ch == "<" and heads[i] is None and not pushed:
                pending_dependents[plane].append(i)
                pushed = True
    # Pending entries are unmatched markers: drop them, attach to root.
    deprels = [label.deprel for label in labels]
    first_headless = True
    for i in range(1, n + 1):
        if heads[i] is None:
            heads[i] = 0
            if first_headless:
                deprels[i - 1] = "root"
                first_headless = False
    final = heads[1:]
    for cycle in _find_cycles(final):
        final[min(cycle) - 1] = 0
    return final, deprels


def _find_cycles(heads: list[int]) -> list[list[int]]:
    """Cycles of the 1-based head function (out-degree 1, so disjoint)."""
    n = len(heads)
    state = [0] * (n + 1)  # 0 unvisited, 1 on path, 2 done
    cycles = []
    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        node = start
        while node != 0 and state[node] == 0:
            state[node] = 1
            path.append(node)
            node = heads[node - 1]
        if node != 0 and state[node] == 1:
            cycles.append(path[path.index(node):])
        for visited in path:
            state[visited] = 2
    return cycles


def serialize_label_file(sentences: list[list[tuple[str, BracketLabel]]]) -> str:
    """Label file: ``form<TAB>brackets<TAB>deprel`` lines, blank-separated.

    An empty bracket string is written as ``-``.
    """
    parts = []
    for entries in sentences:
        for form, label in entries:
            parts.append(f"{form}\t{label.brackets or '-'}\t{label.deprel}")
        parts.append("")
    return "\n".join(parts) + "\n" if parts else ""


def parse_label_file(text: str) -> list[list[tuple[str, BracketLabel]]]:
    sentences = []
    current: list[tuple[str, BracketLabel]] = []
    for line_number, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line:
            if current:
                sentences.append(current)
                current = []
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(
                f"line {line_number}: expected form/brackets/deprel, got {len(fields)} fields"
            )
        brackets = "" if fields[1] == "-" else fields[1]
        current.append((fields[0], BracketLabel(brackets=brackets, deprel=fields[2])))
    if current:
        sentences.append(current)
    return sentences
