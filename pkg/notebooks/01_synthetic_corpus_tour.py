"""
A tour of a synthetic submission corpus
=======================================

Generate a corpus with planted author intent, label every author from
their yearly acceptance rates, and see how well the labels line up.
"""

# %%
from collections import Counter

from peerscope.categorizer import CATEGORIES, acceptance_series, categorize_all
from peerscope.synth import SynthConfig, generate, planted_labels
from peerscope.textfeat import load_sentiment_lexicon, sentiment

config = SynthConfig(seed=7)
corpus = generate(config)
print(corpus)

# %%
# One author's yearly acceptance rates. The categorizer only looks at these.
series = acceptance_series(corpus, "a0000")
print({y: round(r, 2) for y, r in series.per_year.items()})

# %%
planted = planted_labels(config)
found = categorize_all(corpus)
agree = sum(found[a] == c for a, c in planted.items())
print(f"recovered {agree}/{len(planted)} planted categories")
print("found:", Counter(c.value for c in found.values()))

# %%
# Confusion between planted intent (rows) and assigned category (columns)
for p in CATEGORIES:
    row = [sum(planted[a] == p and found[a] == f for a in planted) for f in CATEGORIES]
    print(f"{p.value:>5}", row)

# %%
# Review tone follows the planted category
lex = load_sentiment_lexicon()
for cat in CATEGORIES:
    texts = [t for p in corpus if planted[p.author_ids[0]] == cat for t in p.review_texts()]
    print(cat.value, round(sum(sentiment(t, lex) for t in texts) / len(texts), 3))
