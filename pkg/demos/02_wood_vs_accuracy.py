"""
Two models, one accuracy, different verdicts
============================================

Plain accuracy treats every test sample the same.  The WOOD score weights
each sample by its difficulty chunk (hardest chunk = largest weight), so a
mistake on a hard, out-of-distribution sample costs more than a mistake on
an easy one.  Here both models get 12/18 right, yet the weighted metric
separates them.
"""

import numpy as np

from woodscore import (
    PredictionRecord,
    SampleScore,
    compare_rankings,
    format_wood_report,
    rank_and_chunk,
    wood_score,
)

rng = np.random.default_rng(7)

# 18 scored samples in 3 chunks of 6; chunk 1 is the hardest block
raw = [
    SampleScore(id=f"s{i:02d}", mean_topb=float(m), sum_topb=float(m))
    for i, m in enumerate(rng.random(18))
]
scores = rank_and_chunk(raw, chunk_count=3)
hard = {s.id for s in scores if s.chunk_index == 1}
easy = {s.id for s in scores if s.chunk_index == 3}

# "generalizer" survives the hard chunk but trips on 6 easy samples;
# "memorizer" aces everything it has seen before and fails the hard chunk
generalizer = [PredictionRecord(s.id, s.id not in easy) for s in scores]
memorizer = [PredictionRecord(s.id, s.id not in hard) for s in scores]

result_gen = wood_score(scores, generalizer, model_name="generalizer")
result_mem = wood_score(scores, memorizer, model_name="memorizer")

print(format_wood_report(
    [result_gen, result_mem],
    compare_rankings([result_gen, result_mem]),
))

print()
print("Both models sit at accuracy 12/18 = 0.667.  The weighted score breaks")
print("the tie: the memorizer's six errors all land in chunk 1 (weight 3),")
print("the generalizer's in chunk 3 (weight 1), so W(generalizer) is well")
print("above W(memorizer) even though a leaderboard sorted by accuracy")
print("cannot tell them apart.")
