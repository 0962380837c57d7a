"""
How concentrated is reviewer and editor assignment?
===================================================

Sweep the synthetic routing knob for High authors and watch both the
Shannon diversity of their reviewers and the pairwise Jaccard overlap of
their editor sets respond.
"""

# %%
from peerscope.categorizer import Category
from peerscope.crosscat import assignment_overlap
from peerscope.synth import concentrated_config, generate, planted_labels
from peerscope.textfeat import category_diversity

H, M, L = Category.HIGH, Category.MID, Category.LOW

# %%
for conc in (0.0, 0.5, 1.0):
    cfg = concentrated_config(concentration_high=conc)
    corpus, labels = generate(cfg), planted_labels(cfg)
    r = category_diversity(corpus, labels, H, "reviewer").entropy
    e = category_diversity(corpus, labels, H, "editor").entropy
    j = assignment_overlap(corpus, labels, "editor", "all", H).mean_j
    print(f"concentration {conc:.1f}: reviewer H {r:.3f}  editor H {e:.3f}  editor mean J {j:.3f}")

# %%
# At full concentration, compare categories and the High-Low cross pairs
cfg = concentrated_config()
corpus, labels = generate(cfg), planted_labels(cfg)
for role in ("reviewer", "editor"):
    for cat in (H, M, L):
        rep = assignment_overlap(corpus, labels, role, "all", cat)
        print(role, cat.value, round(rep.mean_j, 3), f"{rep.pct_j_06_1:.1f}% in [0.6, 1]")
cross = assignment_overlap(corpus, labels, "editor", "cross_category", H, L)
print("High-Low editor pairs in [0.6, 1]:", f"{cross.pct_j_06_1:.1f}%")
