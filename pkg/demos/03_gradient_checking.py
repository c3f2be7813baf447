"""Every backward pass is validated against central finite differences.

The tape computes analytic gradients; the oracle perturbs each scalar
parameter by +/-eps and re-evaluates the loss.  The two must agree to a
relative error below 1e-4 (they typically agree to ~1e-9 at fp64).
"""

import numpy as np

from lexsent.gradcheck import check_gradients
from lexsent.gradsuite import run_suite
from lexsent.recurrent import LstmParams, lstm_cell
from lexsent.tensor import Tensor, dot

# check one LSTM step by hand
rng = np.random.default_rng(0)
params = LstmParams("demo", input_dim=3, hidden=4, rng=rng)
x = Tensor(rng.normal(size=3), requires_grad=True)
h0, c0, _ = params.initial_state()
direction = Tensor(rng.normal(size=4))

err = check_gradients(lambda: dot(lstm_cell(x, h0, c0, params)[0], direction),
                      params.parameters() + [x])
print(f"lstm_cell: max relative error vs finite differences = {err:.2e}")

# the full per-operation suite (small sizes here to keep the demo quick)
print("\nfull suite at 2 seeds x 2 sizes:")
for report in run_suite(seeds=2, sizes=2):
    status = "ok" if report.passed else "MISMATCH"
    print(f"  {report.name:26s} {report.max_rel_err:.2e}  {status}")
