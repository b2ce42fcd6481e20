"""
Carnot Lab
Carnot-group geometry, intrinsic hypersurface measures and numerical checks of the
H-perimeter identities and inequalities.
"""

__version__ = "0.1.0"
