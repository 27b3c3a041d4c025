"""From posterior to confidence: the rescaling and the tracking-loss rule.

Trains the classifier on the synthetic corpus, then walks a timeline in
which the operator scans, locks onto a target, and finally loses eye
tracking. The posterior crosses 0.5 long before the confidence becomes
meaningful; the 0.75 s tracking-loss rule kills it instantly.
"""

import numpy as np

from gazeassist import corpus, intent
from gazeassist.corpus import fixation_stream, scanning_stream
from gazeassist.gaze import GazeSample, GazeWindow, StreamSmoother, extract_features, track_loss_elapsed

model = intent.fit(corpus.synthetic_windows(200, seed=7))
rng = np.random.default_rng(1)

stream = (
    scanning_stream(rng, 0.0, 2.0)
    + fixation_stream(rng, 2.0, 3.0, point=(400.0, 200.0))
    + [GazeSample.invalid(5.0 + 0.05 * i) for i in range(25)]  # tracker dropout
)

smoother = StreamSmoother()
window = GazeWindow()
seen: list[GazeSample] = []
print("t      p_intent   track_loss   ci")
for raw in stream:
    s = smoother.push(raw)
    window.update(s, now=raw.t)
    seen.append(raw)
    if raw.t * 20 % 10 != 0:  # print twice a second
        continue
    loss = track_loss_elapsed(seen, raw.t)
    if len(window) >= 5:
        p = intent.posterior(model, extract_features(window))
    else:
        p = 0.0
    ci = intent.confidence(p, loss)
    print(f"{raw.t:5.2f}   {p:8.3f}   {loss:10.2f}   {ci:.3f}")

print()
print("Anything at or below a 0.5 posterior maps to zero confidence; the")
print("linear ramp above it reaches 1.0 only for a certain classifier.")
