"""Seeded batches comparing the two procedures against the brute-force oracle."""

# %%
import numpy as np

from fairsplit.experiments import BatchConfig, format_stats, run_batch

for config in (
    BatchConfig(count=500, n=6, seed=1),
    BatchConfig(count=300, n=4, generator="separable_table", seed=2),
    BatchConfig(count=500, n=5, claims=(2, 1), seed=3),
):
    stats, results = run_batch(config)
    for line in format_stats(stats, config).splitlines():
        if not line.startswith("disagreement_seeds"):
            print(line)
    verdicts, counts = np.unique([r.original_verdict for r in results], return_counts=True)
    print("original verdicts:", dict(zip(verdicts.tolist(), counts.tolist())))
    print()
