"""Empirical Lipschitz constant of the mixed data -> (q on (0, pi), h) map.

Run with ``python3 gallery/stability.py``.  Takes about a minute.
"""
# %%
from halfinv import Perturbation, solve_half_inverse, stability_sweep, synthesize_mixed_data
from halfinv.pipeline import cosine_potential

q = cosine_potential()
base = (q, 0.5, -0.3)
base_report = solve_half_inverse(synthesize_mixed_data(q, 0.5, -0.3, 32))
p = Perturbation(q_amplitude=0.1, H_amplitude=0.05, seed=2024)

# %% [markdown]
# Halving the amplitude should leave the worst ratio roughly unchanged.  A
# Hoelder map would instead show the ratio growing as the amplitude shrinks.

# %%
for factor in (1.0, 0.5, 0.25):
    rows, worst = stability_sweep(base, p.scaled(factor), 8, base_report=base_report)
    truth = max(r.truth_ratio for r in rows)
    print(f"amplitude x{factor:<5} max output/d {worst:.3f}   max truth/d {truth:.3f}")

# %%
print("trial      d   output  ratio")
for r in rows:
    print(f"{r.trial:5d} {r.d:.4f}  {r.output_distance:.4f}  {r.ratio:.3f}")
