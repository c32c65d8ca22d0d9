"""Numerical checks for reflection positivity and Osterwalder-Schrader duality.

Submodules:

* :mod:`osdual.numerics`: quadrature, Hermitian eigensolvers, PSD certificates.
* :mod:`osdual.os_core`: finite OS systems, quotients and induced operators.
* :mod:`osdual.path_measure`: Ornstein-Uhlenbeck path measure.
* :mod:`osdual.su11`: complementary series of SU(1,1) and its holomorphic model.
* :mod:`osdual.bargmann`: Segal-Bargmann transform from the restriction map.
* :mod:`osdual.structure_data`: constants of tube-type domains.
* :mod:`osdual.counterexamples`: ax+b and Heisenberg group examples.
"""

from .errors import OsdualError, TruncationWarning

__version__ = "0.1.0"

__all__ = ["OsdualError", "TruncationWarning", "__version__"]
