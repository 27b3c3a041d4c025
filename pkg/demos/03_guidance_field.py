"""The guidance force landscape around a target.

Reproduces the three canonical views of the force field: the magnitude
over a plane with equal axis weights (radially symmetric hill with a
crater at the target), a 1-D section, and the depth-only variant that is
exactly zero along the reached-depth line. Saves PNGs when matplotlib is
available, always prints the numeric signposts.
"""

import math

import numpy as np

from gazeassist.fixtures import FieldParams, gf_max, guidance_force

target = np.array([0.5, 0.5, 0.5])

fp_equal = FieldParams(weights=(1.0, 1.0, 0.0))
fp_depth = FieldParams(weights=(0.0, 1.0, 0.0))

print(f"peak displacement (1-D, sigma=0.4): {gf_max(FieldParams(weights=(1, 0, 0))):.5f}")
print(f"closed form sigma*exp(-1/2):        {0.4 * math.exp(-0.5):.5f}")
print()

for offset in (0.0, 0.1, 0.2, 0.4, 0.49):
    p_j = target + np.array([offset, 0.0, 0.0])
    mag = guidance_force(p_j, target, fp_equal, ci=1.0).magnitude
    print(f"|gf| at {offset:4.2f} from target: {mag:.4f}")
print()
print("the force vanishes at the target, peaks one sigma out, and fades")
print("again far away, so the operator keeps authority at both extremes")

grid = np.linspace(0.0, 1.0, 81)
mag_equal = np.zeros((81, 81))
mag_depth = np.zeros((81, 81))
for i, x in enumerate(grid):
    for j, y in enumerate(grid):
        p = np.array([x, y, 0.5])
        mag_equal[j, i] = guidance_force(p, target, fp_equal, ci=1.0).magnitude
        mag_depth[j, i] = guidance_force(p, target, fp_depth, ci=1.0).magnitude

row = mag_depth[40, :]  # along the reached-depth line y = 0.5
print(f"\ndepth-only force along y=0.5: max {row.max():.2e} (identically zero)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(15, 4))
    for ax, mag, title in (
        (axes[0], mag_equal, "equal x/y weights"),
        (axes[1], mag_depth, "depth only"),
    ):
        im = ax.imshow(mag, origin="lower", extent=[0, 1, 0, 1], cmap="viridis")
        ax.set_title(f"|gf|, {title}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        fig.colorbar(im, ax=ax)
    axes[2].plot(grid, mag_equal[:, 40])
    axes[2].set_title("section through the target")
    axes[2].set_xlabel("y")
    axes[2].set_ylabel("|gf|")
    fig.tight_layout()
    fig.savefig("guidance_field.png", dpi=120)
    print("wrote guidance_field.png")
except ImportError:
    print("matplotlib not installed; skipped the plots")
