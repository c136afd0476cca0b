"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import hashlib
import time
from itertools import product

import pytest

from conftest import make_sentence
from test_attacks import dl_distance
from test_codec import deprels_for
from test_report import GRAPH, SEQ, TRANSITION, read_table, reference_db
from udperturb.attacks import (
    CONTENT_UPOS,
    PerturbationPolicy,
    eligible_tokens,
    perturb_treebank,
    target_count,
)
from udperturb.codec import (
    BracketLabel,
    assign_planes,
    decode_2planar,
    encode_2planar,
)
from udperturb.conllu import (
    MwtRange,
    Sentence,
    Token,
    Treebank,
    validate_tree,
)
from udperturb.evaluate import attachment_scores, tag_accuracy
from udperturb.keyboard import adjacent_keys, bundled_layout_names, get_layout
from udperturb.report import emit_tables
from udperturb.rng import RngStream
from udperturb.suite import SuiteConfig, generate_suite, overlay_tags

POLICY = PerturbationPolicy(layout=get_layout("qwerty-us"))
RATES = tuple(range(0, 101, 10))

CONTENT_FORMS = [
    "cat", "Gato", "läuft", "quietly", "aaa", "running", "x9y",
    "semmelknödel", "Überraschung", "hello-world", "привет", "mar",
    "Hund", "bbbb", "ox", "1234", "OK-go", "Zanzibar", "blanket",
]
FUNCTION_FORMS = ["the", "a", "of", "in", ".", ",", "und", "le", "?!"]
CONTENT_TAGS = sorted(CONTENT_UPOS)
FUNCTION_TAGS = ["DET", "ADP", "PRON", "AUX", "CCONJ", "PUNCT", "NUM", "PART"]
DEPRELS = ["root", "nsubj", "obj", "det", "advmod", "nmod:poss", "case"]


def build_synthetic_treebank(n_sentences, seed=20240601):
    """Deterministic mixed-content treebank exercising every edge case."""
    rng = RngStream(seed)
    sentences = []
    for index in range(n_sentences):
        n = 4 + rng.below(11)
        tokens = []
        for i in range(1, n + 1):
            if rng.below(100) < 55:
                upos = CONTENT_TAGS[rng.below(len(CONTENT_TAGS))]
                form = CONTENT_FORMS[rng.below(len(CONTENT_FORMS))]
            else:
                upos = FUNCTION_TAGS[rng.below(len(FUNCTION_TAGS))]
                form = FUNCTION_FORMS[rng.below(len(FUNCTION_FORMS))]
            head = rng.below(n + 1)
            while head == i:
                head = rng.below(n + 1)
            feats = ["Number=Sing", "Case=Nom"] if rng.below(4) == 0 else []
            tokens.append(
                Token(
                    id=i,
                    form=form,
                    lemma=form.lower(),
                    upos=upos,
                    xpos="X" + str(rng.below(5)),
                    feats=feats,
                    head=head,
                    deprel=DEPRELS[rng.below(len(DEPRELS))],
                    deps="_",
                    misc="SpaceAfter=No" if rng.below(10) == 0 else "_",
                )
            )
        mwt_ranges = []
        if n >= 3 and rng.below(5) == 0:
            start = 1 + rng.below(n - 1)
            mwt_ranges.append(MwtRange(start, start + 1, "fused", "_"))
        empty_nodes = []
        if rng.below(8) == 0:
            anchor = 1 + rng.below(n)
            empty_nodes.append(
                (anchor, f"{anchor}.1\telided\telide\tVERB\t_\t_\t_\t_\t{anchor}:conj\t_")
            )
        sentences.append(
            Sentence(
                tokens=tokens,
                mwt_ranges=mwt_ranges,
                comments=[f"# sent_id = synth-{index}"],
                empty_nodes=empty_nodes,
            )
        )
    return Treebank(sentences=sentences, source_name="synthetic")


@pytest.fixture(scope="module")
def synthetic_1000():
    return build_synthetic_treebank(1000)


def _assert_annotations_identical(original, perturbed):
    assert len(original.sentences) == len(perturbed.sentences)
    for old, new in zip(original.sentences, perturbed.sentences):
        assert old.comments == new.comments
        assert old.mwt_ranges == new.mwt_ranges
        assert old.empty_nodes == new.empty_nodes
        assert len(old.tokens) == len(new.tokens)
        for ot, nt in zip(old.tokens, new.tokens):
            assert ot.to_line().split("\t")[2:] == nt.to_line().split("\t")[2:]
            assert ot.id == nt.id


def test_criterion_1_attack_soundness(synthetic_1000):
    started = time.perf_counter()
    tb = synthetic_1000
    eligible_per_sentence = [len(eligible_tokens(s, POLICY)) for s in tb.sentences]
    violations = 0
    for rate in RATES:
        for run in range(10):
            perturbed, records = perturb_treebank(
                tb, POLICY, rate / 100.0, seed=rate * 1000 + run
            )
            _assert_annotations_identical(tb, perturbed)
            per_sentence = [0] * len(tb.sentences)
            recorded = set()
            for record in records:
                per_sentence[record.sentence_index] += 1
                recorded.add((record.sentence_index, record.token_id))
                if dl_distance(record.original_form, record.perturbed_form) != 1:
                    violations += 1
                token = perturbed.sentences[record.sentence_index].tokens[
                    record.token_id - 1
                ]
                if token.form != record.perturbed_form:
                    violations += 1
            for index, (old, new) in enumerate(zip(tb.sentences, perturbed.sentences)):
                expected = target_count(rate / 100.0, eligible_per_sentence[index])
                if per_sentence[index] != expected:
                    violations += 1
                for ot, nt in zip(old.tokens, new.tokens):
                    changed = ot.form != nt.form
                    if changed and ot.upos not in CONTENT_UPOS:
                        violations += 1  # non-content token modified
                    if changed and (index, ot.id) not in recorded:
                        violations += 1  # change without a record
    elapsed = time.perf_counter() - started
    assert violations == 0
    assert elapsed < 60.0, f"attack soundness took {elapsed:.1f}s"
    print(f"\ncriterion 1 attack soundness: PASS ({elapsed:.1f}s, 0 violations)")


def test_criterion_2_suite_determinism(tmp_path):
    tb = build_synthetic_treebank(50)
    cfg = SuiteConfig(master_seed=42, policy=POLICY)
    m1 = generate_suite(tb, cfg, tmp_path / "a")
    m2 = generate_suite(tb, cfg, tmp_path / "b")
    assert len(m1.entries) == 101
    assert m1.to_text() == m2.to_text()
    for e1, e2 in zip(m1.entries, m2.entries):
        assert e1.content_digest == e2.content_digest
        bytes_a = (tmp_path / "a" / e1.file_path).read_bytes()
        bytes_b = (tmp_path / "b" / e2.file_path).read_bytes()
        assert hashlib.sha256(bytes_a).hexdigest() == e1.content_digest
        assert bytes_a == bytes_b
    manifest_a = (tmp_path / "a" / "manifest.tsv").read_bytes()
    manifest_b = (tmp_path / "b" / "manifest.tsv").read_bytes()
    assert manifest_a == manifest_b

    m3 = generate_suite(tb, SuiteConfig(master_seed=43, policy=POLICY), tmp_path / "c")
    digests_42 = {(e.rate, e.run_index): e.content_digest for e in m1.entries}
    digests_43 = {(e.rate, e.run_index): e.content_digest for e in m3.entries}
    for rate in RATES:
        if rate == 0:
            continue
        assert any(
            digests_42[(rate, run)] != digests_43[(rate, run)] for run in range(10)
        ), f"rate {rate}: no digest changed with the seed"
    print("\ncriterion 2 suite determinism: PASS (101 files digest-identical)")


def test_criterion_3_codec_round_trip_exhaustive():
    started = time.perf_counter()
    total = skipped_non_planar = 0
    for n in range(1, 7):
        for heads in product(range(n + 1), repeat=n):
            if any(h == i for i, h in enumerate(heads, start=1)):
                continue
            sentence = make_sentence(list(heads), deprels=deprels_for(heads))
            if not validate_tree(sentence).is_tree:
                continue
            if not assign_planes(sentence).is_two_planar:
                skipped_non_planar += 1
                continue
            total += 1
            decoded_heads, decoded_deprels = decode_2planar(encode_2planar(sentence))
            assert decoded_heads == list(heads), heads
            assert decoded_deprels == deprels_for(heads), heads
    elapsed = time.perf_counter() - started
    assert total > 10000  # tens of thousands of round-tripped trees
    assert elapsed < 120.0, f"codec enumeration took {elapsed:.1f}s"
    print(
        f"\ncriterion 3 codec round trip: PASS ({total} trees, "
        f"{skipped_non_planar} non-2-planar skipped, {elapsed:.1f}s)"
    )


def test_criterion_4_decode_totality():
    symbols = ["<", ">", "/", "\\", "<*", ">*", "/*", "\\*"]
    rng = RngStream(31337)
    for _ in range(10000):
        n = 1 + rng.below(20)
        labels = []
        for _ in range(n):
            brackets = "".join(
                symbols[rng.below(len(symbols))] for _ in range(rng.below(5))
            )
            labels.append(BracketLabel(brackets, "dep"))
        heads, deprels = decode_2planar(labels)
        assert len(heads) == len(deprels) == n
        assert all(0 <= h <= n for h in heads)
        report = validate_tree(make_sentence(heads))
        assert report.is_tree, (heads, [l.brackets for l in labels])
    print("\ncriterion 4 decode totality: PASS (10000 fuzzed sequences)")


def test_criterion_5_metric_oracle():
    rng = RngStream(999)
    upos_pool = ["NOUN", "VERB", "DET"]
    deprel_pool = ["root", "nsubj", "det"]
    for _ in range(200):
        n = 1 + rng.below(8)

        def random_sentence():
            heads = []
            for i in range(1, n + 1):
                h = rng.below(n + 1)
                while h == i:
                    h = rng.below(n + 1)
                heads.append(h)
            upos = [upos_pool[rng.below(3)] for _ in range(n)]
            deprels = [deprel_pool[rng.below(3)] for _ in range(n)]
            return make_sentence(heads, upos=upos, deprels=deprels)

        gold = Treebank(sentences=[random_sentence()])
        pred = Treebank(sentences=[random_sentence()])
        score = attachment_scores(gold, pred)
        # Independent brute-force token-by-token counter.
        head_hits = label_hits = upos_hits = 0
        for gt, pt in zip(gold.sentences[0].tokens, pred.sentences[0].tokens):
            if gt.head == pt.head:
                head_hits += 1
                if gt.deprel.lower() == pt.deprel.lower():
                    label_hits += 1
            if gt.upos == pt.upos:
                upos_hits += 1
        assert score.uas == 100.0 * head_hits / n
        assert score.las == 100.0 * label_hits / n
        assert tag_accuracy(gold, pred, "UPOS") == 100.0 * upos_hits / n
    print("\ncriterion 5 metric oracle: PASS (200 random pairs, exact agreement)")


def test_criterion_6_report_table_shapes(tmp_path):
    emit_tables(reference_db(), tmp_path)
    for parser, table in (("transition", TRANSITION), ("graph", GRAPH), ("seq", SEQ)):
        header, rows = read_table(tmp_path / f"{parser}_las_perturbed.tsv")
        assert header == ["rate", "word", "upos", "xpos", "feats"]
        assert len(rows) == 11 and sorted(rows) == sorted(table)
    checks = [
        ("graph_upos_perturbed_delta.tsv", 100, 59.23 - 70.59),  # -11.36
        ("transition_upos_perturbed_delta.tsv", 100, 61.74 - 67.04),  # -5.30
        ("seq_xpos_perturbed_delta.tsv", 100, 54.97 - 52.92),  # +2.05
    ]
    for name, rate, expected in checks:
        _, rows = read_table(tmp_path / name)
        assert float(rows[rate]["delta_las"]) == pytest.approx(expected, abs=0.005)
    print("\ncriterion 6 table-shape reproduction: PASS (11x4 tables, deltas match)")


def test_criterion_7_keyboard_geometry():
    started = time.perf_counter()
    for name in bundled_layout_names():
        layout = get_layout(name)
        for a in sorted(layout.alphabet):
            neighbors = adjacent_keys(layout, a)
            assert a not in neighbors, (name, a)
            for b in neighbors:
                assert a in adjacent_keys(layout, b), (name, a, b)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    print(f"\ncriterion 7 keyboard geometry: PASS ({elapsed * 1000:.0f}ms)")


def test_criterion_8_end_to_end_smoke(tmp_path):
    gold = build_synthetic_treebank(30, seed=7)
    cfg = SuiteConfig(master_seed=11, policy=POLICY)
    manifest = generate_suite(gold, cfg, tmp_path)

    from udperturb.conllu import parse_conllu

    las_perfect = {}
    las_naive = {}
    for entry in manifest.entries:
        perturbed = parse_conllu(
            (tmp_path / entry.file_path).read_text(encoding="utf-8")
        )
        # Setup (ii): tags from the clean treebank overlaid onto the
        # perturbed input, then a perfect parser (prediction == overlay).
        overlaid = overlay_tags(perturbed, gold, "UPOS")
        score = attachment_scores(gold, overlaid)
        las_perfect.setdefault(entry.rate, set()).add(score.las)
        # A parser that attaches every token to token 1; its output depends
        # only on the annotation columns, never on the (perturbed) forms.
        naive = Treebank(
            sentences=[
                make_sentence(
                    [0] + [1] * (len(s.tokens) - 1),
                    forms=[t.form for t in s.tokens],
                    deprels=[t.deprel for t in s.tokens],
                )
                for s in overlaid.sentences
            ]
        )
        naive_score = attachment_scores(gold, naive)
        las_naive.setdefault(entry.rate, set()).add(naive_score.las)

    for rate, values in las_perfect.items():
        assert values == {100.0}, f"perfect parser not at 100.0 for rate {rate}"
    naive_values = set().union(*las_naive.values())
    assert len(naive_values) == 1, f"naive LAS varies across rates: {las_naive}"
    print(
        f"\ncriterion 8 end-to-end smoke: PASS (perfect parser 100.0 at all "
        f"rates; naive parser constant at {naive_values.pop():.2f})"
    )
