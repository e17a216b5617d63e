"""Plane-symmetric relativistic simple waves up to and beyond the first singularity.

The package builds admissible simple-wave data, evaluates the closed-form
solution in geometric coordinates, locates the boundary of its maximal
development, maps it back to Cartesian coordinates, and checks all of it
against an independent finite-difference solver.  Tensor kernels and an
energy-current positivity scan cover the four-dimensional setting.
"""

from .eos import EquationOfState, default_eos
from .errors import RelshockError
from .geo_solution import GeometricSolution
from .seed_data import InitialData, default_seed, prepare_initial_data

__all__ = [
    "EquationOfState",
    "GeometricSolution",
    "InitialData",
    "RelshockError",
    "default_eos",
    "default_seed",
    "prepare_initial_data",
]
__version__ = "0.1.0"
