"""
Scoring a test set by its distance from the training data
==========================================================

A test sample that looks like many training samples is easy; one that looks
like nothing the model ever saw is hard.  This demo scores a tiny test set
against a tiny train set and walks through every field of the result.
"""

from woodscore import (
    Corpus,
    JaccardBackend,
    Sample,
    ScoringConfig,
    score_samples,
)

# a train corpus the "model" is assumed to have learned from
train = Corpus("train", (
    Sample("tr0", "the film was a delight from start to finish"),
    Sample("tr1", "a dull plot and wooden acting ruin the film"),
    Sample("tr2", "the cast carries a thin story with real charm"),
    Sample("tr3", "two hours of my life I will never get back"),
    Sample("tr4", "a charming cast and a clever script"),
    Sample("tr5", "the ending felt rushed but the film works"),
))

# the test set we want to grade by difficulty
test = Corpus("test", (
    Sample("easy", "a charming film with a clever cast"),
    Sample("mid", "the story works but the ending is dull"),
    Sample("hard", "quantum chromodynamics lecture notes, volume two"),
))

# b=0.5: each sample is judged by its 3 closest train neighbours (50% of 6).
# Token-overlap (Jaccard) similarity keeps everything inspectable by eye.
cfg = ScoringConfig(a=1.0, b=0.5, chunk_count=3)
scores = score_samples(train, test, JaccardBackend(), cfg)

print("id     mean_topb  sum_topb  p_raw   hardness  rank  chunk")
for s in scores:
    p = f"{s.p_raw:.4f}" if s.p_raw is not None else "  -  "
    print(
        f"{s.id:<6} {s.mean_topb:>9.4f} {s.sum_topb:>9.4f}  {p}"
        f"  {s.hardness:>8.4f}  {s.rank:>4}  {s.chunk_index:>5}"
    )

print()
print("Reading the table:")
print(" - mean_topb / sum_topb: similarity to the closest half of train")
print(" - p_raw = a / sum_topb: grows as the sample drifts out of distribution")
print(" - hardness: minmax-normalized to [0, 1]; 1 = hardest sample seen")
print(" - rank 1 = most similar to train; chunk 1 = the hardest block")
