"""germforge: exact computations with tangent-to-the-identity germs of (C^3, 0)"""

__version__ = "0.1.0"
