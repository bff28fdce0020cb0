"""Mixed imaginary unit wavefunctions psi = A exp(u S) with u = delta*i + sigma*eps.

Modules:

``algebra``     the four-dimensional algebra spanned by 1, i, eps, i*eps
``trig``        generalized cosine/sine pair and erf
``wavefunction``  evaluation of psi and its square norm
``families``    closed-form amplitude/phase solutions and the energy relation
``residuals``   residual verification of solutions against the 1-D equations
``ode``         quadrature and Runge-Kutta oracles
``cli``         the ``symschro`` command
"""
from .algebra import EPS, I, I_EPS, ONE, EtaElement, MixedUnit, conj, exp_mixed, matrix_rep, mul
from .errors import SymSchroError
from .families import (ClosedFormSolution, PotentialSpec, build_solution, constant_potential,
                       energy_relation, energy_shifted, free_particle, inverse_square,
                       linear_planewave, power_exponential, quadratic_potential)
from .ode import (IvpSpec, NumericSolution, compare_with_closed_form, integrate_amplitude, quadrature,
                  solve_from_closed_form)
from .residuals import (Grid, ResidualReport, VerifyConfig, all_passed, finite_diff, residual_field,
                        verify)
from .trig import TrigPair, cs_eval, erf
from .wavefunction import PsiValue, evaluate_psi, square_norm

__version__ = "0.1.0"

__all__ = [
    "EPS", "I", "I_EPS", "ONE", "EtaElement", "MixedUnit", "conj", "exp_mixed", "matrix_rep", "mul",
    "SymSchroError",
    "ClosedFormSolution", "PotentialSpec", "build_solution", "constant_potential", "energy_relation",
    "energy_shifted", "free_particle", "inverse_square", "linear_planewave", "power_exponential",
    "quadratic_potential",
    "IvpSpec", "NumericSolution", "compare_with_closed_form", "integrate_amplitude", "quadrature",
    "solve_from_closed_form",
    "Grid", "ResidualReport", "VerifyConfig", "all_passed", "finite_diff", "residual_field", "verify",
    "TrigPair", "cs_eval", "erf",
    "PsiValue", "evaluate_psi", "square_norm",
]
