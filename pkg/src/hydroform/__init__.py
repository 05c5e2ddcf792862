"""High-precision hydrogenic and Sturmian form factors via Fock-symmetry multipole coefficients."""
__version__ = "0.1.0"
