"""Low-thrust many-revolution spirals for multi-debris removal with an Ion Beam Shepherd.

Submodules:

- ``elements``: equinoctial/Keplerian elements, constants, plane geometry
- ``propagator``: first-order analytic propagation in true longitude
- ``oracle``: numerical Gauss-equation integration used as reference
- ``shepherd``: thrust split and propellant bookkeeping
- ``deorbit``: perigee-lowering spirals and their (ToF, mass) surrogate
- ``transfer``: two-arc-per-revolution rendezvous spirals and their NLP
- ``optimize``: constrained NLP, evolutionary search, sequence evaluation
- ``phasing``: worst-case phasing delay bounds
- ``cli``: command-line front end
"""

from .elements import EARTH, Constants, EquinoctialState, KeplerianElements

__version__ = "0.1.0"

__all__ = ["EARTH", "Constants", "EquinoctialState", "KeplerianElements", "__version__"]
