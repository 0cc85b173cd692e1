# -*- coding: utf-8 -*-

r"""# Operator symbols and the explicit time step

Both diffusion operators are circulant on the periodic lattice, so every
discrete plane wave $e^{i(a x + b y)}$ is an eigenvector. The eigenvalue, or
*symbol*, tells how fast that mode is damped, and how large the explicit
Euler step may be before the mode is amplified instead.

For the 9-point Laplacian

$$
\sigma_{\mathcal{L}}(a, b) = -1 + 0.4(\cos a + \cos b) + 0.2 \cos a \cos b,
$$

while for the nonlocal operator $\Gamma f = \phi * f - f$ the symbol is
$\hat\phi(a, b) - 1$, the kernel spectrum shifted by the kernel mass.
"""

import matplotlib.pyplot as plt
import numpy as np

import grayscott as gs

n = 64
a = 2 * np.pi * np.arange(n) / n
A, B = np.meshgrid(a, a, indexing="ij")
lap = np.asarray(gs.operators.laplacian9_symbol(A, B))

# %%
# ## Laplacian symbol
# The minimum, $-1.6$, sits at the checkerboard mode $(\pi, \pi)$.

print("min Laplacian symbol:", lap.min())
print("range:", gs.operators.laplacian9_symbol_range())

# %%
# ## Gamma symbol for several kernel widths
# A wider kernel damps short waves less strongly. The symbol of $\Gamma$ flattens out near $-1$ and
# never goes below $-2$.

fig, axes = plt.subplots(1, 4, figsize=(16, 3.6))
im = axes[0].imshow(np.fft.fftshift(lap), cmap="viridis", vmin=-1.6, vmax=0)
axes[0].set_title("9-point Laplacian")
for ax, eps in zip(axes[1:], (0.5, 1.0, 3.0)):
    k = gs.kernel.build_gaussian_kernel(gs.kernel.KernelSpec(eps, n, n))
    sym = np.asarray(k.spectrum.real) - float(k.total_mass)
    ax.imshow(np.fft.fftshift(sym), cmap="viridis", vmin=-1.6, vmax=0)
    ax.set_title(f"Gamma, epsilon = {eps}")
for ax in axes:
    ax.set_xticks([])
    ax.set_yticks([])
fig.colorbar(im, ax=axes, fraction=0.02)

# %%
# ## Stability margins
# The explicit step is stable when $\Delta t\, D\, |\min\sigma| \le 2$ for each species.
# At the published parameters the local model has margin $1.6$ on $u$; the
# mixed model stays below $1$ because $|\min \sigma_\Gamma| < 1$ for a normalized kernel.

p = gs.kinetics.ModelParams()
k = gs.kernel.build_gaussian_kernel(gs.kernel.KernelSpec(1.0, n, n))
for variant in gs.integrator.VARIANTS:
    report = gs.integrator.stability_check(p, variant, k)
    print(f"{variant:<9} margins={report.margins} passed={report.passed}")

dts = np.linspace(0.1, 2.0, 40)
margins = [gs.integrator.stability_check(p._replace(dt=dt), "local").margins["u"] for dt in dts]
plt.figure(figsize=(5, 3.2))
plt.plot(dts, margins, label="local, u")
plt.axhline(gs.integrator.STABILITY_LIMIT, color="k", ls="--", label="limit")
plt.xlabel("dt")
plt.ylabel("margin")
plt.legend()
plt.tight_layout()
