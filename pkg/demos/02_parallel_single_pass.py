"""Imaging several pixels in one pass by encoding them in the photon's OAM.

The photon starts in an equal superposition of d orbital-angular-momentum
values.  Inside the object arm a sorter fans the OAM values onto one path
per pixel, a converter probes every pixel with the same Gaussian mode, and
the inverses undo the fan-out.  Each OAM value then behaves like its own
single-pixel experiment with weight 1/d: a dark-port click D{d}_ell flags
pixel ell as opaque.
"""

from ifmsim import PixelPattern, SchemeConfig, run_scheme

bits = "1010"
d = len(bits)
cfg = SchemeConfig("multipixel-single-pass", PixelPattern.from_bits(bits))
dist = run_scheme(cfg).distribution

print(f"Object pattern (1 = opaque): {bits}")
print(f"\n  {'pixel':>5}  {'bright port':>12}  {'dark port':>10}  meaning")
for ell, f in enumerate(int(b) for b in bits):
    bright = dist.probabilities[f"D0_{ell}"]
    dark = dist.probabilities[f"Dd_{ell}"]
    meaning = "dark clicks reveal the pixel" if f else "never clicks dark"
    print(f"  {ell:>5}  {bright:>12.4f}  {dark:>10.4f}  {meaning}")
print(f"\n  total absorption: {dist.p_abs:.4f} (= 1/2d per opaque pixel)")

print("\nScaling check: every pixel reproduces the single-pixel values / d")
single = {0: (1.0, 0.0), 1: (0.25, 0.25)}
for ell, f in enumerate(int(b) for b in bits):
    expect_bright, expect_dark = (v / d for v in single[f])
    got = (dist.probabilities[f"D0_{ell}"], dist.probabilities[f"Dd_{ell}"])
    print(f"  pixel {ell}: got ({got[0]:.4f}, {got[1]:.4f}), "
          f"expected ({expect_bright:.4f}, {expect_dark:.4f})")
