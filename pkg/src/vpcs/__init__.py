"""Coordinate-space Pauli-Villars evaluation of the Uehling potential.

Natural units throughout (c = hbar = m_e = 1); see :mod:`vpcs.constants`.
"""

from .nuclear import NuclearModel
from .pauli_villars import PauliVillarsSet, make_pv_set
from .tables import PotentialTable

__version__ = "0.1.0"

__all__ = ["NuclearModel", "PauliVillarsSet", "PotentialTable", "make_pv_set", "__version__"]
