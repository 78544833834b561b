from .corpus import CORPUS, get_entry, names
from .runner import EntryOutcome, run_corpus

__all__ = ["CORPUS", "EntryOutcome", "get_entry", "names", "run_corpus"]
