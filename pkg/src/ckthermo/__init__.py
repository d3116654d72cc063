"""Transfer-operator spectra, inverse temperatures and KMS states on Cuntz-Krieger algebras."""
from .ck_algebra import (CKElement, CylinderMeasure, Monomial, adjoint, cylinder_measure,
                         embed_function, expectation_G, gauge_action, kms_condition_check,
                         kms_state, modular_flow, multiply)
from .expression import parse_potential
from .kernels import BACKEND
from .potential import (LocallyConstantPotential, discretize, holder_diagnostic, phi_beta,
                        range_and_positivity)
from .shift_space import (CylinderSpace, ZeroOneMatrix, enumerate_cylinders, extend_to_point,
                          primitivity_exponent, q_function, validate_matrix)
from .thermo import (BetaStarResult, LambdaCurve, LambdaEvaluator, beta_star, bounds_report,
                     lambda_curve, lambda_of_beta)
from .transfer_op import (PerronData, TransferMatrix, algebra_identity_suite, apply,
                          build_transfer_matrix, lambda_by_iterate_norm, perron,
                          rpf_convergence_report)

__version__ = "0.1.0"
