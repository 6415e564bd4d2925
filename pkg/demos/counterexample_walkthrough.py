"""Why the generation phase can hurt: a four-object profile where it deadlocks.

Run with ``python demos/counterexample_walkthrough.py`` from the repository root.
"""

# %%
from pathlib import Path

from fairsplit import load_profile, original_undercut, simplified_undercut, enumerate_ef_splits
from fairsplit.trace import format_trace

profile = load_profile(Path(__file__).resolve().parent.parent / "profiles" / "counterexample.json")
u = profile.universe
for agent in (1, 2):
    values = profile.pref(agent).values
    print(f"agent {agent}:", {name: int(v) for name, v in zip(u.names, values)})

# %% The original procedure hands out each agent's top object, then stalls on the rest.
orig = original_undercut(profile)
print(format_trace(orig.trace, u))

# %% Skipping generation, the same agents reach an envy-free split.
simp = simplified_undercut(profile)
print(format_trace(simp.trace, u))

# %% Brute force agrees that envy-free splits exist.
for c in enumerate_ef_splits(profile):
    print(f"1:{u.format(c.split.to_agent1)} 2:{u.format(c.split.to_agent2)}  {c.verdict}")
