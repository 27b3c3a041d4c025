"""The safety boundary funnel and how confidence reshapes it.

Prints the funnel cross-section radius at a few heights for boundary set
2 as the scaled confidence sweeps from fully open to fully tight, then
demonstrates the clamp: commanded points outside the region project to
the nearest surface point with a spring restoring force.
"""

import numpy as np

from gazeassist.fixtures import adjust_boundary, boundary_preset, constrain, scaled_confidence

base = boundary_preset(2)  # cutting default: theta 30, H 5 cm, S 5 cm

print("confidence sweep for boundary set 2 (S, H, theta):")
for ci in (0.0, 0.3, 0.6, 0.8, 1.0):
    b = adjust_boundary(base, scaled_confidence(ci))
    print(f"  ci={ci:3.1f} -> S={b.s_cm:4.1f} cm  H={b.h_cm:4.1f} cm  theta={b.theta_deg:4.1f} deg")
print()
print("low confidence opens the funnel (free movement), high confidence")
print("tightens it around the target the gaze picked out")

tight = adjust_boundary(base, scaled_confidence(1.0))
print(f"\nfunnel radius by height at full confidence "
      f"(S={tight.s_cm:.0f} cm, theta={tight.theta_deg:.0f} deg):")
import math

for h_cm in (0.0, 2.0, 5.0, 9.0):
    r = tight.s_cm + h_cm / math.tan(math.radians(tight.theta_deg))
    print(f"  h={h_cm:3.1f} cm -> r<={r:5.2f} cm")

print("\nclamping commanded points (stiffness 5 N/cm):")
for raw in ([0.0, 0.0, -0.01], [0.08, 0.0, 0.02], [0.0, 0.12, 0.03]):
    clamped, force = constrain(tight, np.array(raw))
    print(f"  {np.round(raw, 3).tolist()} m -> {np.round(clamped, 4).tolist()} m, "
          f"restoring {np.round(force, 2).tolist()} N")
