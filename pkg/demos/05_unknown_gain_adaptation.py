"""Unknown high-frequency gain of known (negative) sign, relative degree 2.

The feedforward gain returns to the adaptive vector and an auxiliary gain
scales the swapping error inside the augmented error. Everything stays
bounded and the augmented error settles without ever knowing the plant
gain, only its sign.
"""

import numpy as np

from crmadapt import RationalTransfer, Scenario, SignalSpec, simulate

plant = RationalTransfer.from_coeffs([-2.0], [1.0, 2.0, 0.75])
reference = RationalTransfer.from_coeffs([1.0], [1.0, 3.0, 2.0])

scenario = Scenario(
    plant=plant, reference=reference, family="crm_high_unknown",
    ell=(-6.0, -3.0), gamma=10.0, f_poles=(2.0,),
    signal=SignalSpec(kind="multisine",
                      components=((1.0, 0.4, 0.0), (0.7, 1.3, 1.0),
                                  (0.5, 2.9, 2.0))),
    T=200.0, h=1e-3)

trace = simulate(scenario)
print("plant gain:", plant.gain, "(controller only sees the sign)")
print(f"max ||theta||:   {np.max(trace['theta_norm']):.4f}")
print(f"auxiliary gain:  {trace['kchi'][-1]:+.4f} at the end")
print(f"|ea| over the last decade: {np.max(np.abs(trace['ea'][-20000:])):.3e}")
print(f"|ey| over the last decade: {np.max(np.abs(trace['ey'][-20000:])):.3e}")
