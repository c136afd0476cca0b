"""Deterministic generation of the full perturbation suite.

A suite is one file at rate 0 (the unperturbed copy) plus ``runs_per_rate``
independently seeded perturbations for every nonzero rate, laid out as
``out_dir/<rate>/<run>.conllu`` with an ``.attacks.tsv`` sidecar each, all
listed in a digest-carrying manifest. Regenerating a suite from the same
master seed reproduces every byte.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path

from .attacks import PerturbationPolicy, perturb_treebank, serialize_records
from .conllu import TAG_COLUMNS, UPOS_COLUMN, XPOS_COLUMN, Treebank, serialize_conllu
from .evaluate import AlignmentError
from .rng import GOLDEN_GAMMA, splitmix64_next

_MASK64 = (1 << 64) - 1

DEFAULT_RATES = tuple(range(0, 101, 10))
MANIFEST_NAME = "manifest.tsv"
MANIFEST_HEADER = ("rate", "run", "path", "attacks_path", "seed_hex", "sha256")


@dataclass
class SuiteConfig:
    master_seed: int
    policy: PerturbationPolicy
    rates: tuple[int, ...] = DEFAULT_RATES
    runs_per_rate: int = 10

    def __post_init__(self):
        rates = tuple(sorted(set(int(r) for r in self.rates)))
        if not rates:
            raise ValueError("at least one rate is required")
        if rates[0] < 0 or rates[-1] > 100:
            raise ValueError(f"rates must lie in [0, 100], got {rates}")
        self.rates = rates
        if self.runs_per_rate < 1:
            raise ValueError("runs_per_rate must be >= 1")


@dataclass
class ManifestEntry:
    rate: int
    run_index: int
    file_path: str
    attacks_path: str
    child_seed: int
    content_digest: str

    def to_line(self) -> str:
        return "\t".join(
            (
                str(self.rate),
                str(self.run_index),
                self.file_path,
                self.attacks_path,
                f"{self.child_seed:016x}",
                self.content_digest,
            )
        )


@dataclass
class SuiteManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def to_text(self) -> str:
        lines = ["\t".join(MANIFEST_HEADER)]
        lines.extend(entry.to_line() for entry in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SuiteManifest":
        lines = [line for line in text.split("\n") if line]
        if not lines or tuple(lines[0].split("\t")) != MANIFEST_HEADER:
            raise ValueError("manifest header missing or malformed")
        entries = []
        for line in lines[1:]:
            rate, run, path, attacks, seed_hex, digest = line.split("\t")
            entries.append(
                ManifestEntry(int(rate), int(run), path, attacks, int(seed_hex, 16), digest)
            )
        return cls(entries=entries)


def derive_seed(master: int, rate_index: int, run_index: int) -> int:
    """Per-entry child seed; deterministic and distinct across the grid."""
    if rate_index < 0 or run_index < 0:
        raise ValueError("grid indices must be non-negative")
    mix = ((rate_index * 1024 + run_index + 1) * GOLDEN_GAMMA) & _MASK64
    return splitmix64_next((master ^ mix) & _MASK64)[1]


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def generate_suite(tb: Treebank, cfg: SuiteConfig, out_dir: Path | str) -> SuiteManifest:
    """Emit the whole (rate, run) grid plus manifest under ``out_dir``.

    Rate 0 collapses to a single unperturbed copy (all its runs would be
    identical). Entry order is rate-major, run-minor.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = SuiteManifest()
    for rate_index, rate in enumerate(cfg.rates):
        rate_dir = out_dir / f"{rate:03d}"
        rate_dir.mkdir(parents=True, exist_ok=True)
        runs = 1 if rate == 0 else cfg.runs_per_rate
        for run_index in range(runs):
            child_seed = derive_seed(cfg.master_seed, rate_index, run_index)
            if rate == 0:
                perturbed, records = tb, []
            else:
                perturbed, records = perturb_treebank(
                    tb, cfg.policy, rate / 100.0, child_seed
                )
            conllu_path = rate_dir / f"{run_index:02d}.conllu"
            attacks_path = rate_dir / f"{run_index:02d}.attacks.tsv"
            text = serialize_conllu(perturbed)
            _write_text(conllu_path, text)
            _write_text(attacks_path, serialize_records(records))
            manifest.entries.append(
                ManifestEntry(
                    rate=rate,
                    run_index=run_index,
                    file_path=str(conllu_path.relative_to(out_dir)),
                    attacks_path=str(attacks_path.relative_to(out_dir)),
                    child_seed=child_seed,
                    content_digest=_sha256(text),
                )
            )
    _write_text(out_dir / MANIFEST_NAME, manifest.to_text())
    return manifest


def overlay_tags(perturbed: Treebank, tag_source: Treebank, column: str) -> Treebank:
    """Copy of ``perturbed`` with one tag column taken from ``tag_source``.

    Simulates a tagger that is immune to the lexical perturbations: the
    chosen column comes from clean input, everything else stays.
    """
    if column not in TAG_COLUMNS:
        raise ValueError(f"column must be one of {TAG_COLUMNS}, got {column!r}")
    if len(perturbed.sentences) != len(tag_source.sentences):
        raise AlignmentError(
            f"sentence count mismatch: perturbed {len(perturbed.sentences)}, "
            f"tag source {len(tag_source.sentences)}"
        )
    sentences = []
    for index, (ps, ts) in enumerate(zip(perturbed.sentences, tag_source.sentences)):
        if len(ps.tokens) != len(ts.tokens):
            raise AlignmentError(
                f"token count mismatch in sentence {index}: "
                f"perturbed {len(ps.tokens)}, tag source {len(ts.tokens)}"
            )
        tokens = []
        for pt, tt in zip(ps.tokens, ts.tokens):
            if column == UPOS_COLUMN:
                tokens.append(replace(pt, upos=tt.upos))
            elif column == XPOS_COLUMN:
                tokens.append(replace(pt, xpos=tt.xpos))
            else:
                tokens.append(replace(pt, feats=list(tt.feats)))
        sentences.append(replace(ps, tokens=tokens))
    return Treebank(sentences=sentences, source_name=perturbed.source_name)
