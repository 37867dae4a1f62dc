"""Superintegrable Hamiltonian systems from four-dimensional Lie algebras.

The package holds a small symbolic kernel (``expr``), Lie algebra tables
(``algebra``), Poisson brackets (``poisson``), a catalog of realization and
group systems (``catalog``), a randomized verifier (``verify``), flow
integrators (``dynamics``) and the ``hamcat`` command line (``cli``).
"""

__version__ = "0.1.0"

from .catalog import get_system, list_systems, load_catalog_file
from .expr import differentiate, equal_on_samples, evaluate, parse
from .verify import verify_system

__all__ = ["__version__", "parse", "differentiate", "evaluate", "equal_on_samples",
           "get_system", "list_systems", "load_catalog_file", "verify_system"]
