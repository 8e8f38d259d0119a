"""Symbol expansion and boundary inversion of the thermoelastic Dirichlet-to-Neumann map."""

__version__ = "0.1.0"
