# -*- coding: utf-8 -*-

r"""# A first mixed run, audited

We seed a square of $(u, v) = (1/2, 1/4)$ in the middle of a lattice at
equilibrium $(1, 0)$, advance the local and the mixed models side by side,
and audit both trajectories against the bounds of the mixed model.

!!! note
    The uniform state $(1, 0)$ is an exact fixed point of the scheme. Without
    a perturbation nothing ever happens.
"""

from background_utils import plotting

import grayscott as gs

n = 96
lattice = gs.grid.LatticeSpec.from_side(n, n)
p = gs.kinetics.ModelParams()
k = gs.kernel.build_gaussian_kernel(gs.kernel.KernelSpec(1.0, n, n))
s0 = gs.integrator.seed(gs.integrator.SeedSpec(mode="center-square", block_side=16), lattice)
bounds = gs.monitors.compute_bounds(s0.u, s0.v, p, lattice)
print(bounds)

# %%
# ## Advance in chunks and audit
# `advance` runs a compiled loop. We stop every 500 steps to audit the state.

states = {"local": s0, "mixed": s0}
reports = {"local": [], "mixed": []}
for _ in range(10):
    for variant in states:
        states[variant] = gs.integrator.advance(states[variant], p, 500, variant, k)
        r = gs.monitors.audit(states[variant], bounds, p, lattice, variant, k)
        reports[variant].append(r)

for variant, rs in reports.items():
    print(variant, "violations:", sorted({v for r in rs for v in r.violations}) or "none")

# %%
# ## The fields after 5000 steps

plotting.plot_fields(
    {
        "local v": states["local"].v,
        "mixed v": states["mixed"].v,
    },
    windows={"local v": (0, 0.5), "mixed v": (0, 0.5)},
    suptitle="t = 5000",
)

# %%
# ## Monitored quantities
# The sup-norm of $u$ stays below $\max(\sup u_0, 1) = 1$, and the total mass stays far
# below $|\Omega| / \kappa$.

plotting.plot_reports(reports["mixed"])
