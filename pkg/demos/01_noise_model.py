"""Build and inspect an asymmetric readout noise model.

Walks through the committed 5-qubit model: per-qubit error pairs, the full
tensor-product response matrix, the correct-readout diagnostics, and a
finite-shot calibration estimate of the same matrix.
"""

import numpy as np

from readout_rebalance import (
    build_tensor_response,
    default_qubit_params,
    default_response,
    diag_by_zero_count,
    estimate_response,
    load_response,
    save_response,
)

params = default_qubit_params()
print("committed per-qubit error pairs (decay-dominated, worst on qubit 4):")
for i, p in enumerate(params):
    print(f"  qubit {i}: Pr(0->1) = {p.eps01:.4f}   Pr(1->0) = {p.eps10:.4f}")

R = default_response()
rebuilt = build_tensor_response(params)
print(f"\nresponse matrix: {R.dim}x{R.dim}, columns sum to 1,"
      f" matches the tensor build exactly: {np.array_equal(R.entries, rebuilt.entries)}")

print("\nprobability of reading the correct bitstring, by number of 0s:")
for zeros, value in sorted(diag_by_zero_count(R).items()):
    bar = "#" * int(40 * value)
    print(f"  {zeros} zeros: {value:.4f} {bar}")
print("more 1s in the state means a lower chance of reading it correctly,")
print("which is exactly the asymmetry rebalancing exploits.")

print("\ncalibrating the same channel with 2000 shots per basis state:")
estimated = estimate_response(R, shots_per_state=2000, rng=7)
err = np.abs(estimated.entries - R.entries)
print(f"  worst entry error {err.max():.4f}, mean {err.mean():.5f}"
      f" (binomial noise at this shot count)")

save_response(estimated, "/tmp/demo_calibration.json")
again = load_response("/tmp/demo_calibration.json")
print(f"  saved and reloaded bit-exactly: {np.array_equal(estimated.entries, again.entries)}")
