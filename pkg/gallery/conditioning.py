"""Gram conditioning of the auxiliary frequency systems, and the effect of the shift.

Run with ``python3 gallery/conditioning.py``.
"""
# %%
import numpy as np

from halfinv import GridFunction, SolveConfig, riesz_bounds, solve_half_inverse, synthesize_mixed_data
from halfinv.pipeline import random_problem
from halfinv.sl_direct import aux_spectra_lambda, choose_shift

PI = np.pi

# %% [markdown]
# Random problems in the ball of radius 5: the shifted frequencies stay close
# to the lattices n - 1/2 and n - 1, so both Gram matrices stay well away
# from singular.

# %%
for seed in range(6):
    q, h, H = random_problem(np.random.default_rng(seed), 5.0)
    mu2, nu2 = aux_spectra_lambda(q.restrict(PI, 2 * PI), H, 32)
    s = choose_shift([mu2, nu2])
    sb = riesz_bounds(np.sqrt(mu2 + s), "sine")
    cb = riesz_bounds(np.sqrt(nu2 + s), "cosine")
    print(f"seed {seed}  shift {s:.3f}  sine [{sb.smallest_singular_value:.3f}, {sb.largest_singular_value:.3f}]"
          f"  cosine [{cb.smallest_singular_value:.3f}, {cb.largest_singular_value:.3f}]")

# %% [markdown]
# Larger shifts are allowed but cost accuracy, since the kernels grow with
# the shifted omega_minus.

# %%
S = synthesize_mixed_data(GridFunction.constant(0.0, 0.0, 2 * PI), 0.0, 0.0, 32)
for shift in (0.25, 0.75, 2.0):
    rep = solve_half_inverse(S, SolveConfig(shift_policy=shift))
    print(f"shift {shift:4.2f}  max |q| {np.abs(rep.q_left.samples).max():.1e}  |h| {abs(rep.h):.1e}")
