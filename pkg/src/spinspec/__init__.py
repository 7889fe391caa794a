"""spinspec: spectral analysis of twisted circle Dirac operators and their
periodic lattice models, plus exact arithmetic for spin 4-manifold
intersection-form invariants."""

__version__ = "0.1.0"
