"""Data model and bit-faithful reader/writer for CoNLL-U treebanks.

The representation keeps everything needed to reproduce the input file
byte-for-byte (after newline normalization): comments verbatim, multiword
token ranges, and empty-node lines as opaque strings anchored to the token
they follow. Output always uses ``\\n``; input also accepts ``\\r\\n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

UPOS_COLUMN = "UPOS"
XPOS_COLUMN = "XPOS"
FEATS_COLUMN = "FEATS"
TAG_COLUMNS = (UPOS_COLUMN, XPOS_COLUMN, FEATS_COLUMN)


class ConlluParseError(ValueError):
    """Malformed CoNLL-U input; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass
class Token:
    """One syntactic word (a 10-column token line).

    ``feats`` holds the ``key=value`` items of the FEATS column in file
    order, empty for ``_``. ``deps`` and ``misc`` are opaque strings.
    """

    id: int
    form: str
    lemma: str
    upos: str
    xpos: str
    feats: list[str]
    head: int
    deprel: str
    deps: str
    misc: str

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"token id must be >= 1, got {self.id}")
        if self.head < 0:
            raise ValueError(f"head must be >= 0, got {self.head}")
        if self.head == self.id:
            raise ValueError(f"token {self.id} cannot head itself")

    def feats_str(self) -> str:
        return "|".join(self.feats) if self.feats else "_"

    def to_line(self) -> str:
        return "\t".join(
            (
                str(self.id),
                self.form,
                self.lemma,
                self.upos,
                self.xpos,
                self.feats_str(),
                str(self.head),
                self.deprel,
                self.deps,
                self.misc,
            )
        )


@dataclass
class MwtRange:
    """A multiword-token range line (``a-b``); carries no head/deprel."""

    start: int
    end: int
    surface_form: str
    misc: str

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"range {self.start}-{self.end} is reversed")

    def to_line(self) -> str:
        return "\t".join(
            (f"{self.start}-{self.end}", self.surface_form) + ("_",) * 7 + (self.misc,)
        )


@dataclass
class Sentence:
    """Ordered tokens plus everything else needed for round-tripping.

    ``empty_nodes`` keeps each ``a.b`` line verbatim as ``(anchor, line)``
    where anchor is the integer part of its id; these lines are excluded
    from ``tokens`` and never perturbed or evaluated.
    """

    tokens: list[Token]
    mwt_ranges: list[MwtRange] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)
    empty_nodes: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    def to_lines(self) -> list[str]:
        lines = list(self.comments)
        ranges = {r.start: r for r in self.mwt_ranges}
        empties: dict[int, list[str]] = {}
        for anchor, raw in self.empty_nodes:
            empties.setdefault(anchor, []).append(raw)
        lines.extend(empties.get(0, ()))
        for token in self.tokens:
            if token.id in ranges:
                lines.append(ranges[token.id].to_line())
            lines.append(token.to_line())
            lines.extend(empties.get(token.id, ()))
        return lines


@dataclass
class Treebank:
    sentences: list[Sentence]
    source_name: str = ""

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass
class TreeReport:
    is_tree: bool
    root_count: int
    cycle_members: list[int]


def _parse_int(text: str, what: str, line_number: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConlluParseError(f"non-numeric {what} {text!r}", line_number) from None


def _finish_sentence(
    tokens: list[Token],
    mwt_ranges: list[MwtRange],
    comments: list[str],
    empty_nodes: list[tuple[int, str]],
    line_number: int,
) -> Sentence:
    n = len(tokens)
    previous_end = 0
    for r in sorted(mwt_ranges, key=lambda r: r.start):
        if not (1 <= r.start <= r.end <= n):
            raise ConlluParseError(
                f"range {r.start}-{r.end} outside token span 1..{n}", line_number
            )
        if r.start <= previous_end:
            raise ConlluParseError(
                f"range {r.start}-{r.end} overlaps an earlier range", line_number
            )
        previous_end = r.end
    for anchor, raw in empty_nodes:
        if not 0 <= anchor <= n:
            node_id = raw.split("\t", 1)[0]
            raise ConlluParseError(
                f"empty node {node_id} anchored outside 0..{n}", line_number
            )
    for token in tokens:
        if token.head > n:
            raise ConlluParseError(
                f"token {token.id} has head {token.head} > sentence length {n}",
                line_number,
            )
    return Sentence(
        tokens=tokens, mwt_ranges=mwt_ranges, comments=comments, empty_nodes=empty_nodes
    )


def parse_conllu(text: str, source_name: str = "") -> Treebank:
    """Parse full CoNLL-U file contents into a :class:`Treebank`.

    Raises :class:`ConlluParseError` for malformed token lines (wrong column
    count, non-numeric id/head, out-of-order ids, out-of-range heads).
    """
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    mwt_ranges: list[MwtRange] = []
    comments: list[str] = []
    empty_nodes: list[tuple[int, str]] = []
    open_block = False

    for line_number, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line:
            if open_block:
                sentences.append(
                    _finish_sentence(tokens, mwt_ranges, comments, empty_nodes, line_number)
                )
                tokens, mwt_ranges, comments, empty_nodes = [], [], [], []
                open_block = False
            continue
        open_block = True
        if line.startswith("#"):
            if tokens or mwt_ranges or empty_nodes:
                raise ConlluParseError("comment after token lines", line_number)
            comments.append(line)
            continue
        columns = line.split("\t")
        if len(columns) != 10:
            raise ConlluParseError(
                f"expected 10 tab-separated columns, got {len(columns)}", line_number
            )
        token_id = columns[0]
        if "." in token_id:
            # Empty node: preserved verbatim, excluded from the token list.
            anchor = _parse_int(token_id.split(".", 1)[0], "empty-node id", line_number)
            empty_nodes.append((anchor, line))
            continue
        if "-" in token_id:
            start_s, _, end_s = token_id.partition("-")
            start = _parse_int(start_s, "range start", line_number)
            end = _parse_int(end_s, "range end", line_number)
            if start > end:
                raise ConlluParseError(f"reversed range {token_id}", line_number)
            if any(columns[i] != "_" for i in range(2, 9)):
                raise ConlluParseError(
                    "multiword range line must have '_' in columns 3-9", line_number
                )
            mwt_ranges.append(MwtRange(start, end, columns[1], columns[9]))
            continue
        tid = _parse_int(token_id, "id", line_number)
        head = _parse_int(columns[6], "head", line_number)
        if tid != len(tokens) + 1:
            raise ConlluParseError(
                f"token id {tid} out of order (expected {len(tokens) + 1})", line_number
            )
        try:
            token = Token(
                id=tid,
                form=columns[1],
                lemma=columns[2],
                upos=columns[3],
                xpos=columns[4],
                feats=[] if columns[5] == "_" else columns[5].split("|"),
                head=head,
                deprel=columns[7],
                deps=columns[8],
                misc=columns[9],
            )
        except ValueError as exc:
            raise ConlluParseError(str(exc), line_number) from None
        tokens.append(token)

    if open_block:
        sentences.append(
            _finish_sentence(tokens, mwt_ranges, comments, empty_nodes, line_number)
        )
    return Treebank(sentences=sentences, source_name=source_name)


def serialize_conllu(tb: Treebank) -> str:
    """Emit valid CoNLL-U text; inverse of :func:`parse_conllu`.

    Every sentence block is followed by exactly one blank line.
    """
    parts: list[str] = []
    for sentence in tb.sentences:
        parts.extend(sentence.to_lines())
        parts.append("")
    return "\n".join(parts) + "\n" if parts else ""


def validate_tree(sentence: Sentence) -> TreeReport:
    """Check that the head links form a directed tree over the virtual root.

    ``is_tree`` is true iff every token reaches token 0 by following heads,
    which for single-headed tokens is equivalent to the absence of cycles.
    ``cycle_members`` lists the ids lying on cycles, ascending.
    """
    heads = {t.id: t.head for t in sentence.tokens}
    root_count = sum(1 for h in heads.values() if h == 0)
    # Each node has out-degree 1, so cycles are disjoint; walk with
    # three-state marking to find nodes that close a cycle.
    state = {tid: 0 for tid in heads}  # 0 unvisited, 1 on path, 2 done
    on_cycle: set[int] = set()
    for start in heads:
        if state[start] != 0:
            continue
        path = []
        node = start
        while node != 0 and state[node] == 0:
            state[node] = 1
            path.append(node)
            node = heads[node]
        if node != 0 and state[node] == 1:
            # Found a new cycle: everything from `node` onward in the path.
            on_cycle.update(path[path.index(node):])
        for visited in path:
            state[visited] = 2
    return TreeReport(
        is_tree=not on_cycle, root_count=root_count, cycle_members=sorted(on_cycle)
    )


def replace_token_form(sentence: Sentence, token_id: int, new_form: str) -> Sentence:
    """Copy of ``sentence`` with one token's FORM replaced; all else shared."""
    tokens = [
        replace(t, form=new_form) if t.id == token_id else t for t in sentence.tokens
    ]
    return replace(sentence, tokens=tokens)
