"""Command-line entry point.

Subcommands cover the whole pipeline: ``perturb`` (one rate), ``suite``
(full grid), ``encode``/``decode`` (bracketing codec), ``overlay-tags``,
``eval``, and ``report``. Exit codes: 0 success, 1 usage error, 2 data or
contract error. Randomized subcommands require an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import attacks, codec, conllu, evaluate, keyboard, report, suite

USAGE_ERROR = 1
DATA_ERROR = 2

_DATA_ERRORS = (
    conllu.ConlluParseError,
    keyboard.LayoutFormatError,
    evaluate.AlignmentError,
    report.ScoresDbError,
    codec.NotATreeError,
    codec.NotTwoPlanarError,
    ValueError,
    OSError,
)

POLICY_KEYS = ("content_upos", "min_form_length", "layout", "rates", "runs")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract
    # reserves 2 for data errors, so route through our own exception.
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _read_text(path: str) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValueError(f"{path} is not valid UTF-8: {exc}") from None


def _load_treebank(path: str) -> conllu.Treebank:
    try:
        return conllu.parse_conllu(_read_text(path), source_name=path)
    except conllu.ConlluParseError as exc:
        raise conllu.ConlluParseError(f"{path}: {exc.args[0]}", exc.line_number) from None


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_number, raw in enumerate(_read_text(path).split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path} line {line_number}: expected key=value")
        key = key.strip()
        if key not in POLICY_KEYS:
            raise ValueError(
                f"{path} line {line_number}: unknown key {key!r} (known: {', '.join(POLICY_KEYS)})"
            )
        values[key] = value.strip()
    return values


def _parse_rates(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise ValueError(f"bad rate list {text!r}; expected comma-separated integers") from None


def _build_policy(args) -> attacks.PerturbationPolicy:
    config = _parse_config_file(args.policy) if args.policy else {}
    layout_name = args.layout or config.get("layout") or "qwerty-us"
    layout = keyboard.get_layout(layout_name)
    content_upos = attacks.CONTENT_UPOS
    if "content_upos" in config:
        content_upos = frozenset(
            tag.strip().upper() for tag in config["content_upos"].split(",") if tag.strip()
        )
    min_len = int(config.get("min_form_length", 3))
    return attacks.PerturbationPolicy(
        layout=layout, content_upos=content_upos, min_form_length=min_len
    )


def _write_out(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _cmd_perturb(args) -> int:
    tb = _load_treebank(args.input)
    policy = _build_policy(args)
    if not 0 <= args.rate <= 100:
        raise ValueError(f"--rate must be in [0, 100], got {args.rate}")
    perturbed, records = attacks.perturb_treebank(tb, policy, args.rate / 100.0, args.seed)
    out_dir = Path(args.out_dir)
    stem = Path(args.input).stem
    _write_out(out_dir / f"{stem}.conllu", conllu.serialize_conllu(perturbed))
    _write_out(out_dir / f"{stem}.attacks.tsv", attacks.serialize_records(records))
    print(f"wrote {out_dir / (stem + '.conllu')} ({len(records)} attacks)", file=sys.stderr)
    return 0


def _cmd_suite(args) -> int:
    tb = _load_treebank(args.input)
    config = _parse_config_file(args.policy) if args.policy else {}
    rates = suite.DEFAULT_RATES
    if "rates" in config:
        rates = _parse_rates(config["rates"])
    if args.rates is not None:
        rates = _parse_rates(args.rates)
    runs = int(config.get("runs", 10))
    if args.runs is not None:
        runs = args.runs
    cfg = suite.SuiteConfig(
        master_seed=args.seed, policy=_build_policy(args), rates=rates, runs_per_rate=runs
    )
    manifest = suite.generate_suite(tb, cfg, args.out_dir)
    print(f"wrote {len(manifest.entries)} treebank files under {args.out_dir}", file=sys.stderr)
    return 0


def _cmd_encode(args) -> int:
    tb = _load_treebank(args.input)
    encoded = []
    failures = []
    for index, sentence in enumerate(tb.sentences):
        try:
            labels = codec.encode_2planar(sentence)
        except (codec.NotATreeError, codec.NotTwoPlanarError) as exc:
            failures.append((index, exc))
            continue
        encoded.append([(t.form, label) for t, label in zip(sentence.tokens, labels)])
    if failures:
        first_index, first_error = failures[0]
        raise codec.NotTwoPlanarError(
            f"sentence {first_index}: {first_error} "
            f"({len(failures)} of {len(tb.sentences)} sentences cannot be encoded)"
        )
    sys.stdout.write(codec.serialize_label_file(encoded))
    return 0


def _cmd_decode(args) -> int:
    sentences = codec.parse_label_file(_read_text(args.input))
    out_sentences = []
    for entries in sentences:
        heads, deprels = codec.decode_2planar([label for _, label in entries])
        tokens = [
            conllu.Token(
                id=i,
                form=form,
                lemma="_",
                upos="_",
                xpos="_",
                feats=[],
                head=head,
                deprel=deprel,
                deps="_",
                misc="_",
            )
            for i, ((form, _), head, deprel) in enumerate(zip(entries, heads, deprels), start=1)
        ]
        out_sentences.append(conllu.Sentence(tokens=tokens))
    sys.stdout.write(conllu.serialize_conllu(conllu.Treebank(sentences=out_sentences)))
    return 0


def _cmd_overlay_tags(args) -> int:
    perturbed = _load_treebank(args.input)
    tag_source = _load_treebank(args.gold)
    result = suite.overlay_tags(perturbed, tag_source, args.column)
    sys.stdout.write(conllu.serialize_conllu(result))
    return 0


def _cmd_eval(args) -> int:
    gold = _load_treebank(args.gold)
    pred = _load_treebank(args.pred)
    options = evaluate.ScoreOptions(
        deprel_granularity=args.deprel, include_punct=not args.exclude_punct
    )
    score = evaluate.attachment_scores(gold, pred, options)
    print(f"las\t{score.las:.2f}")
    print(f"uas\t{score.uas:.2f}")
    for column in conllu.TAG_COLUMNS:
        accuracy = evaluate.tag_accuracy(gold, pred, column)
        print(f"{column.lower()}_acc\t{accuracy:.2f}")
    print(f"tokens\t{score.token_count}")
    return 0


def _cmd_report(args) -> int:
    written = report.emit_tables(_read_text(args.input), args.out_dir, args.tag_setup)
    print(f"wrote {len(written)} report files under {args.out_dir}", file=sys.stderr)
    return 0


def _seed(value: str) -> int:
    return int(value, 0) & ((1 << 64) - 1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="udperturb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_policy_flags(p):
        p.add_argument("--layout", help="keyboard layout: bundled name, language code, or file path")
        p.add_argument("--policy", help="key=value config file (see README)")

    p = sub.add_parser("perturb", help="perturb a treebank at one rate")
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--rate", required=True, type=int, help="perturbation rate in percent")
    p.add_argument("--seed", required=True, type=_seed)
    add_policy_flags(p)
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("suite", help="generate the full (rate, run) grid")
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--rates", help="comma-separated rates in percent (default 0,10,...,100)")
    p.add_argument("--runs", type=int, help="runs per nonzero rate (default 10)")
    add_policy_flags(p)
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("encode", help="treebank -> bracket label file (stdout)")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="bracket label file -> treebank skeleton (stdout)")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("overlay-tags", help="replace one tag column from a clean treebank")
    p.add_argument("--input", required=True, help="perturbed treebank")
    p.add_argument("--gold", required=True, help="treebank providing the tag column")
    p.add_argument("--column", required=True, choices=conllu.TAG_COLUMNS)
    p.set_defaults(func=_cmd_overlay_tags)

    p = sub.add_parser("eval", help="score one prediction file against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--deprel", choices=(evaluate.FULL_DEPREL, evaluate.UNIVERSAL_DEPREL),
                   default=evaluate.FULL_DEPREL)
    p.add_argument("--exclude-punct", action="store_true",
                   help="skip tokens whose gold UPOS is PUNCT")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("report", help="scores database -> tables and plot data")
    p.add_argument("--input", required=True, help="scores database (TSV)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--tag-setup", choices=("perturbed", "clean"),
                   help="restrict emission to one tag setup")
    p.set_defaults(func=_cmd_report)
    return parser


def run_cli(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE_ERROR
    except SystemExit as exc:  # argparse exits directly for --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"udperturb {args.command}: {exc}", file=sys.stderr)
        return DATA_ERROR


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
