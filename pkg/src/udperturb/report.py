"""Aggregate a scores database into tables and plot data.

The scores database is a TSV with header ``treebank, config, tag_setup,
rate, run, las, uas, upos_acc, xpos_acc, feats_acc``; one row per evaluated
prediction file. Conventions:

* ``config`` is ``<parser>:<inputs>`` with inputs one of word/upos/xpos/
  feats (for example ``graph:word``); rows whose parser part is ``tagger``
  feed the tagger-accuracy table instead.
* ``tag_setup`` is ``perturbed``, ``clean``, or ``-`` when not applicable.
* a metric that was not measured is written as ``-``.

Emitted per (parser, tag_setup) group: a mean-LAS table with one row per
rate and one column per input configuration, a parallel stddev table, and
one plot-data file per non-word configuration with the per-rate mean LAS
difference against the word baseline. Output is a pure function of the
database: no timestamps, fixed ordering, two-decimal cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .evaluate import aggregate_runs

DB_HEADER = (
    "treebank",
    "config",
    "tag_setup",
    "rate",
    "run",
    "las",
    "uas",
    "upos_acc",
    "xpos_acc",
    "feats_acc",
)
INPUT_CONFIGS = ("word", "upos", "xpos", "feats")
TAG_SETUPS = ("perturbed", "clean", "-")
TAGGER_PARSER = "tagger"


class ScoresDbError(ValueError):
    """Malformed or incomplete scores database."""


@dataclass
class ScoreRow:
    treebank: str
    config: str
    tag_setup: str
    rate: int
    run: int
    las: float | None
    uas: float | None
    upos_acc: float | None
    xpos_acc: float | None
    feats_acc: float | None

    @property
    def parser(self) -> str:
        return self.config.split(":", 1)[0]

    @property
    def inputs(self) -> str:
        _, _, inputs = self.config.partition(":")
        return inputs


def _parse_metric(text: str, what: str, line_number: int) -> float | None:
    if text == "-":
        return None
    try:
        return float(text)
    except ValueError:
        raise ScoresDbError(f"line {line_number}: non-numeric {what} {text!r}") from None


def parse_scores_db(text: str) -> list[ScoreRow]:
    lines = [line for line in text.replace("\r\n", "\n").split("\n") if line]
    if not lines or tuple(lines[0].split("\t")) != DB_HEADER:
        raise ScoresDbError(
            "scores database must start with the header: " + "\t".join(DB_HEADER)
        )
    rows = []
    for line_number, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(DB_HEADER):
            raise ScoresDbError(
                f"line {line_number}: expected {len(DB_HEADER)} columns, got {len(fields)}"
            )
        if fields[2] not in TAG_SETUPS:
            raise ScoresDbError(
                f"line {line_number}: tag_setup must be one of {TAG_SETUPS}, got {fields[2]!r}"
            )
        try:
            rate = int(fields[3])
            run = int(fields[4])
        except ValueError:
            raise ScoresDbError(f"line {line_number}: non-integer rate/run") from None
        rows.append(
            ScoreRow(
                treebank=fields[0],
                config=fields[1],
                tag_setup=fields[2],
                rate=rate,
                run=run,
                las=_parse_metric(fields[5], "las", line_number),
                uas=_parse_metric(fields[6], "uas", line_number),
                upos_acc=_parse_metric(fields[7], "upos_acc", line_number),
                xpos_acc=_parse_metric(fields[8], "xpos_acc", line_number),
                feats_acc=_parse_metric(fields[9], "feats_acc", line_number),
            )
        )
    if not rows:
        raise ScoresDbError("scores database has no data rows")
    return rows


def _check_grid(rows: list[ScoreRow], rates: list[int]) -> None:
    rate_set = set(rates)
    missing = []
    groups: dict[tuple[str, str, str], set[int]] = {}
    for row in rows:
        groups.setdefault((row.treebank, row.config, row.tag_setup), set()).add(row.rate)
    for (treebank, config, setup), seen in sorted(groups.items()):
        for rate in sorted(rate_set - seen):
            missing.append(f"(treebank={treebank}, config={config}, tag_setup={setup}, rate={rate})")
    if missing:
        raise ScoresDbError("incomplete (config, rate) grid; missing cells: " + ", ".join(missing))


def _mean_stddev(values: list[float]) -> tuple[float, float]:
    agg = aggregate_runs(values)
    return agg.mean, agg.stddev


def _setup_token(setup: str) -> str:
    return "any" if setup == "-" else setup


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def emit_tables(db_text: str, out_dir: Path | str, tag_setup: str | None = None) -> list[Path]:
    """Write all tables and plot-data files; returns the paths written.

    ``tag_setup`` optionally restricts emission to one setup. Raises
    :class:`ScoresDbError` when the database is empty, malformed, or has an
    incomplete grid.
    """
    rows = parse_scores_db(db_text)
    rates = sorted({row.rate for row in rows})
    _check_grid(rows, rates)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def cell_values(parser, inputs, setup, rate, metric):
        out = []
        for row in rows:
            if row.parser != parser or row.inputs != inputs or row.rate != rate:
                continue
            # The word baseline carries no tags, so it is shared across
            # tag setups.
            if inputs != "word" and row.tag_setup != setup:
                continue
            value = getattr(row, metric)
            if value is not None:
                out.append(value)
        return out

    parsers = sorted({row.parser for row in rows if row.parser != TAGGER_PARSER})
    for parser in parsers:
        setups = sorted(
            {row.tag_setup for row in rows if row.parser == parser and row.inputs != "word"}
        )
        if not setups:
            setups = sorted({row.tag_setup for row in rows if row.parser == parser})
        for setup in setups:
            if tag_setup is not None and setup != tag_setup:
                continue
            inputs_present = [
                inputs
                for inputs in INPUT_CONFIGS
                if any(cell_values(parser, inputs, setup, rate, "las") for rate in rates)
            ]
            means: dict[tuple[str, int], float] = {}
            stds: dict[tuple[str, int], float] = {}
            for inputs in inputs_present:
                for rate in rates:
                    values = cell_values(parser, inputs, setup, rate, "las")
                    if not values:
                        raise ScoresDbError(
                            f"no las values for (parser={parser}, inputs={inputs}, "
                            f"tag_setup={setup}, rate={rate})"
                        )
                    means[(inputs, rate)], stds[(inputs, rate)] = _mean_stddev(values)
            token = _setup_token(setup)
            header = "rate\t" + "\t".join(inputs_present)
            mean_lines = [header]
            std_lines = [header]
            for rate in rates:
                mean_lines.append(
                    f"{rate}\t" + "\t".join(_fmt(means[(i, rate)]) for i in inputs_present)
                )
                std_lines.append(
                    f"{rate}\t" + "\t".join(_fmt(stds[(i, rate)]) for i in inputs_present)
                )
            las_path = out_dir / f"{parser}_las_{token}.tsv"
            las_path.write_text("\n".join(mean_lines) + "\n", encoding="utf-8")
            written.append(las_path)
            std_path = out_dir / f"{parser}_las_{token}_stddev.tsv"
            std_path.write_text("\n".join(std_lines) + "\n", encoding="utf-8")
            written.append(std_path)
            if "word" in inputs_present:
                for inputs in inputs_present:
                    if inputs == "word":
                        continue
                    lines = ["rate\tdelta_las\tstddev"]
                    for rate in rates:
                        delta = means[(inputs, rate)] - means[("word", rate)]
                        lines.append(f"{rate}\t{_fmt(delta)}\t{_fmt(stds[(inputs, rate)])}")
                    delta_path = out_dir / f"{parser}_{inputs}_{token}_delta.tsv"
                    delta_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
                    written.append(delta_path)

    tagger_rows = [row for row in rows if row.parser == TAGGER_PARSER]
    tagger_setups = sorted({row.tag_setup for row in tagger_rows})
    for setup in tagger_setups:
        if tag_setup is not None and setup != tag_setup:
            continue
        lines = ["rate\tupos\txpos\tfeats"]
        for rate in rates:
            cells = []
            for metric in ("upos_acc", "xpos_acc", "feats_acc"):
                values = [
                    getattr(row, metric)
                    for row in tagger_rows
                    if row.tag_setup == setup
                    and row.rate == rate
                    and getattr(row, metric) is not None
                ]
                cells.append(_fmt(_mean_stddev(values)[0]) if values else "-")
            lines.append(f"{rate}\t" + "\t".join(cells))
        path = out_dir / f"tagger_accuracy_{_setup_token(setup)}.tsv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)

    return written
