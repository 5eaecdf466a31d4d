"""Spatial bang-bang decoupling of photon noise in optical fibers.

Truncated Fock-space simulation, exact phase calculus for control
sequences, segmented-fiber propagation and decoherence spacing bounds.
"""
from .bound import BoundQuery, SpectralDensity, delta_bound, gamma_closed_zero_T, gamma_quadrature
from .fock import FockError, FockOperator, FockSpace, FockState
from .grammar import ParseError, parse_element, parse_sequence, parse_terms
from .hamiltonian import ConfigError, FiberModel
from .monomials import (
    BILINEAR,
    EIGHT_STEP,
    LINEAR,
    NAMED_SEQUENCES,
    OMEGA12,
    OMEGA1234,
    SET_A,
    SET_B,
    SET_C,
    SIXTEEN_STEP,
    BeamSplitter,
    ControlSequence,
    Monomial,
    PhaseShifter,
    classify,
)
from .propagator import evolve
from .search import search_sequences

__version__ = "0.1.0"
