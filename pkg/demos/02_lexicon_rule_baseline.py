"""The unsupervised lexicon-rule baseline, and why it motivates learning.

The scorer walks a sentence left to right: polar words contribute +1 or
-1, a privative adjacent to a polar word flips and halves it.  That
handles "not bad" nicely, but one intervening word ("not SO bad") breaks
the adjacency and the score comes out strongly negative, which is
plainly wrong.
"""

from lexsent.baseline import lex_rule_classify
from lexsent.lexicon import KeyWordLexicon

toy = KeyWordLexicon({"good": "Pos", "bad": "Neg", "not": "Pri"})

for sentence in ("it is good", "it is not bad", "it is not so bad"):
    result = lex_rule_classify(sentence, toy)
    contributions = ", ".join(f"{w}: {s:+.2f}" for w, s in result.contributions)
    print(f"{sentence!r:24s} score {result.score:+.2f} -> {result.label:8s}"
          f"  (counted: {contributions})")

print("\nThe last sentence is mildly positive to a human reader; the rule"
      "\nset has no way to see past the broken adjacency. The trained"
      "\ntwo-level model exists to do better.")
