"""Word dictionaries and the embedding builders that consume them.

Three dictionary families feed the networks: key lexical words (six
categories including the catch-all ``Oth``), POS tags (eight, unknown
tokens default to ``others``), and an ordered conjunction list encoded
with duplication 1 so the vector length equals the word count.

All lookups happen at the word level.  When the model runs on
characters, each character inherits the annotation of the word
containing it; if no segmentation is supplied, containing words are
recovered by greedy longest match against the union of dictionaries.

Lexicons are immutable once loaded, so concurrent readers need no
coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .encoding import RhoHotFamily
from .errors import DataError
from .tensor import Tensor

KEYWORD_CATEGORIES = ("Pos", "Neg", "Pri", "Sup", "Int", "Oth")
POS_TAGS = ("noun", "adjective", "verb", "pronoun", "adverb",
            "preposition", "accessory", "others")


class KeyWordLexicon:
    """word -> one of Pos/Neg/Pri/Sup/Int; anything unlisted is Oth."""

    def __init__(self, entries: dict[str, str] | None = None):
        self._map: dict[str, str] = {}
        for word, cat in (entries or {}).items():
            self.add(word, cat)

    def add(self, word: str, category: str) -> None:
        if category not in KEYWORD_CATEGORIES[:-1]:
            raise DataError(f"unknown key-word category {category!r} for {word!r}")
        old = self._map.get(word)
        if old is not None and old != category:
            raise DataError(f"word {word!r} listed as both {old} and {category}")
        self._map[word] = category

    def category(self, word: str) -> str:
        return self._map.get(word, "Oth")

    def words(self, category: str) -> list[str]:
        return sorted(w for w, c in self._map.items() if c == category)

    def counts(self) -> dict[str, int]:
        out = {c: 0 for c in KEYWORD_CATEGORIES[:-1]}
        for c in self._map.values():
            out[c] += 1
        return out

    def __contains__(self, word):
        return word in self._map

    def __len__(self):
        return len(self._map)


class PosLexicon:
    """token -> POS tag; unknown tokens are tagged ``others``."""

    def __init__(self, entries: dict[str, str] | None = None):
        self._map: dict[str, str] = {}
        for token, tag in (entries or {}).items():
            self.add(token, tag)

    def add(self, token: str, tag: str) -> None:
        if tag not in POS_TAGS:
            raise DataError(f"unknown POS tag {tag!r} for {token!r}")
        self._map[token] = tag

    def tag(self, token: str) -> str:
        return self._map.get(token, "others")

    def counts(self) -> dict[str, int]:
        out = {t: 0 for t in POS_TAGS}
        for t in self._map.values():
            out[t] += 1
        return out

    def __len__(self):
        return len(self._map)


class ConjunctionLexicon:
    """Ordered, duplicate-free conjunction list; position is identity."""

    def __init__(self, words):
        words = list(words)
        if len(set(words)) != len(words):
            raise DataError("duplicate conjunction words")
        self.words = words
        self._index = {w: i for i, w in enumerate(words)}

    def index(self, word: str) -> int | None:
        return self._index.get(word)

    def __contains__(self, word):
        return word in self._index

    def __len__(self):
        return len(self.words)


@dataclass
class TokenAnnotation:
    """A network input token plus its word-level lexicon annotation.

    In character mode ``word`` is the containing word and the category
    and POS tag are the containing word's; in word mode it is the token
    itself.
    """
    surface: str
    word: str
    keyword_category: str
    pos_tag: str


@dataclass
class Lexicons:
    keywords: KeyWordLexicon
    pos: PosLexicon
    conjunctions: ConjunctionLexicon

    def dictionary_words(self) -> set[str]:
        words = set(self.keywords._map)
        words.update(self.pos._map)
        words.update(self.conjunctions.words)
        return words


# -- annotation ----------------------------------------------------------

def _containing_words(chars: list[str], words: list[str]) -> list[str]:
    """Map each character to the segmentation word covering it.

    Characters the segmentation skips (commonly punctuation) become
    their own one-character words.
    """
    out = []
    wi, ci = 0, 0
    for ch in chars:
        while wi < len(words) and ci >= len(words[wi]):
            wi += 1
            ci = 0
        if wi < len(words) and words[wi][ci] == ch:
            out.append(words[wi])
            ci += 1
        else:
            out.append(ch)
    return out


def greedy_segment(chars: list[str], vocabulary: set[str]) -> list[str]:
    """Longest-match segmentation against a word list; characters not
    starting any known word become one-character words."""
    max_len = max((len(w) for w in vocabulary), default=1)
    words = []
    i = 0
    n = len(chars)
    while i < n:
        match = None
        for length in range(min(max_len, n - i), 0, -1):
            cand = "".join(chars[i:i + length])
            if cand in vocabulary:
                match = cand
                break
        if match is None:
            words.append(chars[i])
            i += 1
        else:
            words.append(match)
            i += len(match)
    return words


def _greedy_match_words(chars: list[str], vocabulary: set[str]) -> list[str]:
    """Per-character containing words under greedy segmentation."""
    out = []
    for w in greedy_segment(chars, vocabulary):
        out.extend([w] * len(w))
    return out


def attach_lexicon(tokens: list[str], segmentation: list[str] | None,
                   lexicons: Lexicons, mode: str = "word",
                   pos_tags: list[str] | None = None) -> list[TokenAnnotation]:
    """Annotate tokens with key-word category and POS tag.

    ``pos_tags`` aligns with ``tokens`` in word mode and with
    ``segmentation`` in character mode (one tag per word).
    """
    if mode == "word":
        anns = []
        for i, tok in enumerate(tokens):
            tag = pos_tags[i] if pos_tags else lexicons.pos.tag(tok)
            anns.append(TokenAnnotation(tok, tok, lexicons.keywords.category(tok), tag))
        return anns
    if mode != "char":
        raise DataError(f"unknown annotation mode {mode!r}")
    if segmentation:
        words = _containing_words(tokens, segmentation)
        word_tag = {}
        if pos_tags:
            word_tag = dict(zip(segmentation, pos_tags))
    else:
        words = _greedy_match_words(tokens, lexicons.dictionary_words())
        word_tag = {}
    anns = []
    for ch, w in zip(tokens, words):
        tag = word_tag.get(w) or lexicons.pos.tag(w)
        anns.append(TokenAnnotation(ch, w, lexicons.keywords.category(w), tag))
    return anns


# -- embedding builders ----------------------------------------------------

def keyword_embed(token: TokenAnnotation, family: RhoHotFamily) -> Tensor:
    """Rho-hot key-word vector; the Oth block fires for unlisted words."""
    if family.count != len(KEYWORD_CATEGORIES):
        raise DataError(f"key-word family needs {len(KEYWORD_CATEGORIES)} categories")
    return family.encode(family.index(token.keyword_category))


def pos_embed(token: TokenAnnotation, family: RhoHotFamily) -> Tensor:
    if family.count != len(POS_TAGS):
        raise DataError(f"POS family needs {len(POS_TAGS)} categories")
    return family.encode(family.index(token.pos_tag))


def conjunction_embed(word: str, lex: ConjunctionLexicon,
                      family: RhoHotFamily) -> Tensor:
    """Rho-hot conjunction vector; all-zero for non-conjunctions."""
    if family.n != 1:
        raise DataError("conjunction encoding uses duplication 1")
    if family.count != len(lex):
        raise DataError(f"conjunction family size {family.count} != lexicon {len(lex)}")
    idx = lex.index(word)
    if idx is None:
        return family.encode_absent()
    return family.encode(idx)


def make_keyword_family(n: int, rho_init: float = 0.5) -> RhoHotFamily:
    return RhoHotFamily("keyword", KEYWORD_CATEGORIES, n=n, rho_init=rho_init)


def make_pos_family(n: int, rho_init: float = 0.5) -> RhoHotFamily:
    return RhoHotFamily("pos", POS_TAGS, n=n, rho_init=rho_init)


def make_conjunction_family(lex: ConjunctionLexicon,
                            rho_init: float = 0.5) -> RhoHotFamily:
    return RhoHotFamily("conjunction", list(lex.words), n=1, rho_init=rho_init)


# -- dictionary files ------------------------------------------------------

def _read_lines(path: Path) -> list[str]:
    return [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")]


def load_keyword_lexicon(path) -> KeyWordLexicon:
    """Load key words from a ``word<TAB>category`` file or a directory
    of per-category files whose stems name the category."""
    path = Path(path)
    lex = KeyWordLexicon()
    if path.is_dir():
        stems = {c.lower(): c for c in KEYWORD_CATEGORIES[:-1]}
        for child in sorted(path.iterdir()):
            cat = stems.get(child.stem.lower())
            if cat is None:
                continue
            for word in _read_lines(child):
                lex.add(word.split("\t")[0], cat)
        return lex
    for i, line in enumerate(_read_lines(path), start=1):
        fields = line.split("\t")
        if len(fields) != 2:
            raise DataError(f"{path}:{i}: expected word<TAB>category, got {line!r}")
        lex.add(fields[0], fields[1])
    return lex


def load_pos_lexicon(path) -> PosLexicon:
    path = Path(path)
    lex = PosLexicon()
    for i, line in enumerate(_read_lines(path), start=1):
        fields = line.split("\t")
        if len(fields) != 2:
            raise DataError(f"{path}:{i}: expected token<TAB>tag, got {line!r}")
        lex.add(fields[0], fields[1])
    return lex


def load_conjunctions(path) -> ConjunctionLexicon:
    """One conjunction per line; file order fixes the category index."""
    words = [ln.split("\t")[0] for ln in _read_lines(Path(path))]
    return ConjunctionLexicon(words)


def load_lexicons(dicts_dir) -> Lexicons:
    """Load the conventional dictionary layout from a directory.

    Expects ``keywords.tsv`` (or per-category files ``Pos.txt`` etc.),
    optionally ``pos.tsv``, and ``conjunctions.txt``.
    """
    d = Path(dicts_dir)
    if not d.is_dir():
        raise DataError(f"dictionary directory not found: {dicts_dir}")
    kw_file = d / "keywords.tsv"
    if kw_file.exists():
        keywords = load_keyword_lexicon(kw_file)
    else:
        keywords = load_keyword_lexicon(d)
    pos_file = d / "pos.tsv"
    pos = load_pos_lexicon(pos_file) if pos_file.exists() else PosLexicon()
    conj_file = d / "conjunctions.txt"
    if not conj_file.exists():
        raise DataError(f"missing conjunction list: {conj_file}")
    conjunctions = load_conjunctions(conj_file)
    return Lexicons(keywords, pos, conjunctions)
