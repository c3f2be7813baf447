"""Unsupervised lexicon-rule sentiment scorer.

Scans tokens left to right.  Polar words contribute +1/-1.  A privative
immediately before a polar word flips and halves that word's score
(contributing 0 itself but still entering the denominator); a privative
not adjacent to a following polar word contributes half the raw score
of the nearest polar word after it (0 if none) while that polar word
keeps its own raw score.  The final score is the mean over counted
words.  These rules are deliberately naive; their misreading of
"not so bad" as strongly negative is the method's documented failure
mode.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import CLAUSE_DELIMITERS, tokenize
from .lexicon import KeyWordLexicon, greedy_segment

POSITIVE_THRESHOLD = 0.2
NEGATIVE_THRESHOLD = -0.2

_POLARITY = {"Pos": 1.0, "Neg": -1.0}


@dataclass
class RuleScore:
    contributions: list[tuple[str, float]]
    score: float
    label: str


def _classify(score: float, counted: int,
              pos_cut: float = POSITIVE_THRESHOLD,
              neg_cut: float = NEGATIVE_THRESHOLD) -> str:
    if counted == 0:
        return "neutral"
    if score > pos_cut:
        return "positive"
    if score < neg_cut:
        return "negative"
    return "neutral"


def lex_rule_score(tokens: list[str], keywords: KeyWordLexicon,
                   pos_cut: float = POSITIVE_THRESHOLD,
                   neg_cut: float = NEGATIVE_THRESHOLD) -> RuleScore:
    """Score a token sequence; unknown words are simply not counted."""
    if not tokens:
        raise ValueError("lex_rule_score needs at least one token")
    cats = [keywords.category(t) for t in tokens]
    contributions: list[tuple[str, float]] = []
    consumed = set()
    for i, (tok, cat) in enumerate(zip(tokens, cats)):
        if i in consumed:
            continue
        if cat == "Pri":
            nxt = cats[i + 1] if i + 1 < len(tokens) else None
            if nxt in _POLARITY:
                # adjacent polar word: flip and halve it, privative counts as 0
                contributions.append((tok, 0.0))
                contributions.append((tokens[i + 1], -_POLARITY[nxt] / 2.0))
                consumed.add(i + 1)
            else:
                following = next((_POLARITY[c] for c in cats[i + 1:] if c in _POLARITY),
                                 0.0)
                contributions.append((tok, following / 2.0))
        elif cat in _POLARITY:
            contributions.append((tok, _POLARITY[cat]))
    counted = len(contributions)
    score = sum(s for _, s in contributions) / counted if counted else 0.0
    return RuleScore(contributions, score, _classify(score, counted, pos_cut, neg_cut))


def lex_rule_classify(text: str, keywords: KeyWordLexicon, mode: str = "word",
                      pos_cut: float = POSITIVE_THRESHOLD,
                      neg_cut: float = NEGATIVE_THRESHOLD) -> RuleScore:
    """Tokenize the whole text (clause structure is irrelevant here) and
    score it; texts with no counted words come back neutral at 0.

    Character mode regroups characters into dictionary words by greedy
    longest match, since the rules operate on words.
    """
    raw = tokenize(text, mode)
    if mode == "word":
        raw = [t.strip(CLAUSE_DELIMITERS) for t in raw]
    tokens = [t for t in raw if t and t not in CLAUSE_DELIMITERS]
    if mode == "char" and tokens:
        tokens = greedy_segment(tokens, set(keywords._map))
    if not tokens:
        return RuleScore([], 0.0, "neutral")
    return lex_rule_score(tokens, keywords, pos_cut, neg_cut)
