"""Shrinking-target experiments on the circle and torus: exact circle
arithmetic, invariant measures, expanding maps, rotations and Denjoy
homeomorphisms, hit counting and tail-union measures."""

__version__ = "0.1.0"
