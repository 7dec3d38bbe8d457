"""Tour of the linear-systems layer: polynomials, transfer functions,
strict positive realness and decay-rate certificates."""

import numpy as np

from crmadapt import (Polynomial, RationalTransfer, decay_rate, is_spr,
                      is_minimum_phase, kyp_solve, observer_canonical,
                      relative_degree, strip_gain)

# polynomials are plain coefficient arrays, highest degree first
p = Polynomial([1.0, 4.0, 3.0])
print("p(s) = s^2 + 4s + 3, roots:", np.sort(p.roots().real))

# a transfer function keeps its high-frequency gain as a separate factor;
# the sign of that gain is what the adaptive update laws depend on
plant = RationalTransfer.from_coeffs([6.0, 6.0], [2.0, 2.0, 0.0])
k, unit = strip_gain(plant)
print(f"gain {k}, unit-gain part num={unit.num.to_list()} den={unit.den.to_list()}")
print("relative degree:", relative_degree(plant))
print("minimum phase:", is_minimum_phase(plant))

# strict positive realness is certified on a dense frequency grid
for num, den in [([1.0], [1.0, 1.0]),
                 ([1.0], [1.0, 1.0, 1.0]),
                 ([1.0, 2.0], [1.0, 6.0, 8.0])]:
    w = RationalTransfer.from_coeffs(num, den)
    cert = is_spr(w)
    print(f"SPR {num}/{den}: {cert.verdict}"
          + (f"  ({cert.reason})" if cert.reason else ""))

# an SPR error path admits a Lyapunov certificate: P b = c and
# A'P + PA = -gg' - 2 mu P with the largest feasible decay rate mu
err = RationalTransfer.from_coeffs([1.0, 2.0], [1.0, 6.0, 8.0])
model = observer_canonical(err)
sol = kyp_solve(model, decay_rate(err.den))
print("certified decay rate:", sol.mu)
print("P =", np.round(sol.P, 6).tolist())
print("residual:", sol.residual)
