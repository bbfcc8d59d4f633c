"""
Reading a model through the difficulty lens
===========================================

With hardness scores in hand, the analysis helpers answer four questions:
does the error rate actually track difficulty, how does confidence behave,
where does the in-distribution regime end, and which samples deserve human
annotation first.
"""

import numpy as np

from woodscore import (
    SampleScore,
    annotation_plan,
    bernoulli_predictions,
    chunk_error_curve,
    iid_ood_boundary,
    monotonicity,
    sts_bins,
    sts_maxprob_correlation,
    synthetic_scores,
)

rng = np.random.default_rng(11)

# a synthetic 700-sample test set; correctness gets likelier with similarity
scores = synthetic_scores(700, rng, chunk_count=7)
predictions = bernoulli_predictions(scores, alpha=4.0, rng=rng, with_confidence=True)

# 1. error rate per difficulty chunk, hardest first
stats = chunk_error_curve(scores, predictions, chunk_count=7)
print("chunk  size  mean_sts  error_rate")
for s in stats:
    print(f"{s.chunk_index:>5}  {s.size:>4}  {s.mean_sts:>8.4f}  {s.error_rate:>10.4f}")
rho = monotonicity(stats, "error_rate")
print(f"monotonicity (chunk index vs error rate): {rho:+.3f}")
print("   -1 means errors fall steadily as samples get easier\n")

# 2. does the model's confidence know what the hardness score knows?
rho_conf = sts_maxprob_correlation(scores, predictions)
print(f"similarity vs confidence, Spearman: {rho_conf:+.3f}\n")

# 3. a fixed-edge difficulty testbed: B1 easiest ... B4 hardest
bins = sts_bins(scores, edges=[0.0, 0.25, 0.5, 0.75, 1.0])
print("bin  interval           samples  share")
for b in bins:
    print(f"{b.label:<4} [{b.lower_edge:.2f}, {b.upper_edge:.2f}]"
          f"  {len(b.sample_ids):>7}  {b.share:>6.3f}")
print()

# 4. where does IID end?  Compare against a drifted set at half the similarity.
drifted = [
    SampleScore(id=s.id, mean_topb=s.mean_topb * 0.5, sum_topb=s.sum_topb * 0.5)
    for s in synthetic_scores(700, np.random.default_rng(12), chunk_count=7)
]
report = iid_ood_boundary(scores, drifted, chunk_count=7)
print(f"IID mean {report.iid_mean:.4f} vs OOD mean {report.ood_mean:.4f}")
print(f"IID above OOD in {report.iid_exceeds_count}/7 chunks;"
      f" boundary estimate {report.boundary:.4f}\n")

# 5. annotation triage: everything under 0.7 gets a human look, and we want
#    at least 400 samples under 0.5 in the final benchmark
plan = annotation_plan(scores, annotate_threshold=0.7, create_threshold=0.5,
                       target_hard_count=400)
print(f"{len(plan.annotate_ids)} samples queued for annotation"
      f" (similarity < {plan.annotate_threshold})")
print(f"{plan.create_deficit} genuinely hard samples still need to be written"
      f" to reach the target")
