"""A separable preference that is not responsive, and what the procedures do with it."""

# %%
from pathlib import Path

from fairsplit import is_responsive, is_separable, load_profile, minimal_bundles, simplified_undercut
from fairsplit.trace import format_trace

profile = load_profile(Path(__file__).resolve().parent.parent / "profiles" / "example1.json")
u = profile.universe
h = profile.pref(1)

# %% Separability holds, responsiveness fails, and the validator says where.
print("separable:", is_separable(h).holds)
report = is_responsive(h)
w = report.witness
print("responsive:", report.holds, f"S={u.format(w['set'])} x={u.names[w['x']]} y={u.names[w['y']]}")

# %% Minimal bundles only need separability, so the simplified procedure still works.
for agent in (1, 2):
    print(agent, [u.format(b) for b in minimal_bundles(profile.pref(agent), u.full())])
print(format_trace(simplified_undercut(profile).trace, u))
