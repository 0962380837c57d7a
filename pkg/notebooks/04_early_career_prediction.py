"""
Predicting an author's category from early career
=================================================

Features come from the first three career years only; the label is the
full-career category. Train a forest and boosted trees and compare.
"""

# %%
from importlib.resources import files

from peerscope.categorizer import categorize_all
from peerscope.classifier import build_dataset, evaluate_dataset, split_authors, train_gbt, train_random_forest
from peerscope.corpus import load_corpus

corpus = load_corpus(files("peerscope.data") / "fixture.jsonl")
labels = categorize_all(corpus)
data = build_dataset(corpus, labels)
train, test = split_authors(data, test_fraction=0.3, seed=7)
print(len(train), "train authors,", len(test), "test authors")

# %%
forest = train_random_forest(train, {"trees": 200, "seed": 7})
boosted = train_gbt(train, {"rounds": 300, "seed": 7})
for name, model in (("forest", forest), ("boosted", boosted)):
    rep = evaluate_dataset(model, test)
    print(name, "macro F1", round(rep.macro_f1, 3))
    print(rep.confusion)

# %%
# Which early signals matter most?
rep = evaluate_dataset(forest, test)
for feature, score in rep.importances[:8]:
    print(f"{feature:<22} {score:.3f}")

# %%
# Boosting keeps its training loss from rising, round by round
hist = boosted.loss_history_
print(round(hist[0], 3), "->", round(hist[-1], 3))
