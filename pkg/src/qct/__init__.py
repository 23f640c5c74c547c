"""Exact constant-term kernel for the q-Dyson / q-Morris / Baker-Forrester
family of Laurent-polynomial products, with closed-form evaluators and the
verification suites that check every identity at desk scale.
"""

__version__ = "0.1.0"
