"""Free-fermion determinantal point processes in one dimension: spectral
projectors of Schrodinger operators, classical flow quantities, exact
fluctuation statistics, exact sampling and multi-well decompositions."""
from fermiszego.kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
