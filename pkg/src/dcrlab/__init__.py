"""Exact, desk-scale verification lab for collision games, entropy
accounting, and hiding commitments.

Everything is computed over fully enumerable spaces: probabilities are
exact rationals, security games are exact statistical distances, and the
inequalities connecting them are checked term by term instead of being
asymptotic claims.
"""

from dcrlab.probkit import Dist, JointDist

__all__ = ["Dist", "JointDist"]
__version__ = "0.1.0"
