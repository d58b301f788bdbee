"""Critical complex Ginzburg-Landau blow-up laboratory.

Exact verification of the profile constants and cancellation identities,
the Jordan-basis spectral machinery of the linearized flow, and a
self-similar-variables simulator with modulation and two-parameter
shooting.
"""

__version__ = "0.1.0"
