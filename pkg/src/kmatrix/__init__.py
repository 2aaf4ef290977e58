"""Exact K-theory checks for finite matrix subrings.

Submodules: ``abgroup`` (finitely generated abelian groups), ``finring``
and ``finmod`` (finite rings and modules), ``matshape`` (matrix subring
patterns), ``kdirect`` (K0/K1 oracles), ``ksymbolic`` (formal rewriting),
``gvtools`` (GV-ideals) and ``cli``.
"""

__version__ = "0.1.0"
