"""Weighted claims: an agent with claim 2 against 1 wants at least two thirds of the value.

The undercut step can stall here. The procedure then reports a deadlock with a note in
the trace, rather than returning a split that fails the weighted envy-freeness test.
"""

# %%
from pathlib import Path

from fairsplit import enumerate_ef_splits, load_profile, simplified_undercut
from fairsplit.trace import format_trace

profile = load_profile(Path(__file__).resolve().parent.parent / "profiles" / "unequal_claims.json")
u = profile.universe
print("claims:", profile.claims)

out = simplified_undercut(profile)
print(format_trace(out.trace, u))

# %%
splits = enumerate_ef_splits(profile)
print("weighted envy-free splits found by brute force:", len(splits))
for c in splits[:3]:
    print(f"  1:{u.format(c.split.to_agent1)} 2:{u.format(c.split.to_agent2)}")

# %% Scaling both claims equally changes nothing.
print(simplified_undercut(profile.with_claims((1, 1))) == simplified_undercut(profile.with_claims((5, 5))))
