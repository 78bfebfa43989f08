# Verification package

from .oracle import GridPoint, expected_utility, fit_grid, grid_best, lattice_size, simplex_lattice, vertex_lattice
from .certificate import Certificate, ObservationVerdict, corner_directional_derivative, verify_certificate
