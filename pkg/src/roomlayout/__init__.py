"""Constraint-based interior layout engine.

Objects and placement constraints are elicited from a natural-language brief,
compiled onto a library of differentiable cost functions, and solved by staged
multi-start sequential quadratic programming.
"""

__version__ = "0.1.0"
