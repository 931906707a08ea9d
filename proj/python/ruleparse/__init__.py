"""Rule-based dependency pre-annotation and parser features for Turkish treebanks."""

from pathlib import Path

from ._ruleparse import (
    EngineError,
    FormatError,
    LemmaSuffixMatrix,
    Lexicon,
    MorphAnalysis,
    Sentence,
    SuffixInventory,
    Token,
    ablate,
    annotate,
    build_matrix,
    export_features,
    parse_conllu,
    read_conllu_file,
    read_matrix,
    score,
    sigtest,
    write_conllu,
)

__version__ = "0.1.0"


def data_dir() -> Path:
    """Directory holding the shipped lexicon and suffix inventory."""
    here = Path(__file__).resolve().parent
    for candidate in (here / "data", here.parents[1] / "data"):
        if (candidate / "suffix_inventory.tsv").is_file():
            return candidate
    raise FileNotFoundError("shipped data directory not found")


def default_lexicon() -> Lexicon:
    return Lexicon.load_dir(str(data_dir() / "lexicon"))


def default_inventory() -> SuffixInventory:
    return SuffixInventory.load(str(data_dir() / "suffix_inventory.tsv"))


__all__ = [
    "EngineError",
    "FormatError",
    "LemmaSuffixMatrix",
    "Lexicon",
    "MorphAnalysis",
    "Sentence",
    "SuffixInventory",
    "Token",
    "ablate",
    "annotate",
    "build_matrix",
    "data_dir",
    "default_inventory",
    "default_lexicon",
    "export_features",
    "parse_conllu",
    "read_conllu_file",
    "read_matrix",
    "score",
    "sigtest",
    "write_conllu",
]
