"""Graph immersions, the free inverse monoid and deck transformation groups."""

__version__ = '0.1.0'
