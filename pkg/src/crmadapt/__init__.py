"""Closed-loop reference model adaptive control for SISO plants.

Simulation of output-feedback adaptive loops of arbitrary relative degree,
SPR/Lyapunov certification of the error paths, and executable closed-form
L2 performance bounds checked against integrated trajectories.
"""

from .polyalg import Polynomial, RootReport, coeffs_close
from .lintf import (RationalTransfer, SprCertificate, SprGrid, strip_gain,
                    relative_degree, is_minimum_phase, is_spr, decay_rate,
                    tf_to_dict, tf_from_dict)
from .realize import (StateSpaceModel, ReferenceModel, NonMinimalErrorModel,
                      UnstableDesignWarning, observer_canonical,
                      build_reference_model, error_injection_tf,
                      tracking_error_tf, design_gain, nonminimal_error_model,
                      ssm_to_dict, ssm_from_dict)
from .kyp import KypSolution, KypInfeasible, kyp_solve
from .matching import (MatchedParameters, default_lambda, regressor_companion,
                       bezout_match)
from .controllers import (FAMILIES, reference_model_step, regressor_step,
                          ctrl_n1, ctrl_n2, ctrl_highrel_known,
                          ctrl_highrel_unknown)
from .simengine import (SignalSpec, Scenario, SimTrace, ScenarioError,
                        SprPreconditionError, SimulationDiverged,
                        resolve_signal, compile_scenario, simulate, rk4_step,
                        l2_norm, linf_norm)
from .bounds import (BoundReport, CertificateUnavailable, exp_envelope_constant,
                     exp_kernels, filter_samples, tracking_error_energy_bound,
                     augmented_error_energy_bounds, swapping_error_energy_bound,
                     filtered_swap_and_tracking_bounds, all_bound_reports)

__version__ = "0.1.0"
