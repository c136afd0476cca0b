"""Adversarial misspelling suites for Universal Dependencies treebanks.

Generates deterministic character-level perturbations of CoNLL-U test
sets, linearizes trees with a 2-planar bracketing codec, and scores
external parser/tagger predictions (LAS/UAS, tag accuracy, score curves).
"""

__version__ = "0.1.0"
