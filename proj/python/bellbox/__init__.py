"""Desk-scale laboratory for nonlocal correlations and causality.

Correlation models (classical sawtooth, quantum singlet, superquantum PR),
CHSH evaluation and estimation, nonsignaling and jamming audits, the three
bound optimizers (2, 2*sqrt(2), 4), and Minkowski light-cone geometry for
jamming configurations.
"""

from bellbox._core import *  # noqa: F401,F403
from bellbox._core import __version__  # noqa: F401
