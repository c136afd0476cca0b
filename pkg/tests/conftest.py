from pathlib import Path

import pytest

from udperturb.conllu import Sentence, Token, Treebank, parse_conllu

DATA_DIR = Path(__file__).parent / "data"


def make_sentence(heads, upos=None, forms=None, deprels=None):
    """Build a bare sentence from a head vector (1-based token ids)."""
    n = len(heads)
    upos = upos or ["NOUN"] * n
    forms = forms or [f"w{i}" for i in range(1, n + 1)]
    deprels = deprels or ["root" if h == 0 else "dep" for h in heads]
    tokens = [
        Token(
            id=i,
            form=forms[i - 1],
            lemma="_",
            upos=upos[i - 1],
            xpos="_",
            feats=[],
            head=heads[i - 1],
            deprel=deprels[i - 1],
            deps="_",
            misc="_",
        )
        for i in range(1, n + 1)
    ]
    return Sentence(tokens=tokens)


def make_treebank(head_vectors, **kwargs):
    return Treebank(sentences=[make_sentence(h, **kwargs) for h in head_vectors])


@pytest.fixture
def fixture_text():
    return (DATA_DIR / "fixture.conllu").read_text(encoding="utf-8")


@pytest.fixture
def fixture_treebank(fixture_text):
    return parse_conllu(fixture_text, source_name="fixture")
