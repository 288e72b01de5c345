"""gerbelab: twisted Cech cohomology, lifting gerbe obstructions, Schwinger
cocycles, and discrete Chern-Weil integrals at desk scale."""

from .cech import (BocksteinResult, Certificate, CoboundaryResult, Cochain,
                   CohomologyGroup, TwistedLocalSystem, bockstein_dd, cochain,
                   cochain_add, cochain_from_dict, cochain_neg, cochain_sub,
                   coboundary, cohomology, is_coboundary, is_cocycle,
                   u1_is_coboundary, zero_cochain)
from .coeffs import (Automorphism, CentralExtension, CoefficientGroup,
                     FiniteGroup, SemidirectElement, cyclic_central_extension,
                     semidirect_group, semidirect_inv, semidirect_mul,
                     verify_extension)
from .connection import (BundleData, Chart, ChartedBase, OverlapMap,
                         SampledForm, chern_number, classifying_point,
                         curvature, gauge_residual, local_connection,
                         two_arc_circle, two_chart_sphere)
from .lifting import (CocycleReport, LiftChoice, ObstructionResult,
                      TransitionData, TrivializeResult, change_lifts,
                      check_gerbe_module, check_twisted_cocycle,
                      lifts_via_section, obstruction, trivialize)
from .nerve import Nerve, build_nerve, faces, random_nerve, simplices
from .schwinger import (BlockOperator, CentralElement, DefectCurvature,
                        DiracDefect, LoopPolynomial, block_operator,
                        cocycle_identity_defect, defect_curvature,
                        dirac_defect, extension_bracket, jacobi_defect,
                        loop_scale, schwinger_residue, schwinger_trace)

__version__ = "0.1.0"
