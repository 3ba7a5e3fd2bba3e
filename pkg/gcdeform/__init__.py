"""
Exact deformation calculus for generalized complex branes on polynomial models.
Provides Courant algebroid operations, GC structures and branes, deformations over
local Artin algebras, and the DGLA / Tot / obstruction layer. No floating point.
"""

from .errors import (GCDeformError, ContextMismatchError, DomainError, NotClosedError, IncompatibleError,
                     InsolubleError, ComplexError, ConsistencyError, NotHomomorphismError, SchemaError, ConfigError)
from .results import CheckResult, Cohomology
from .artin import ArtinAlgebra, ArtinHom, SmallExtension, MElement, make_artin, truncate, small_extension_chain, bch
from .cartan import Chart, VectorField, DiffForm
from .courant import GenSection, SymElement, dorfman, courant_bracket, pairing
from .gcs import GCStructure, standard_gc, make_complex_gc, make_symplectic_gc, is_integrable
from .brane import Brane, NerveCover, CoordSubmanifold, HermData, make_brane, trivial_brane, cohomology
from .deform import BraneDeformation, DescentDatum, KKKElement
from .complexes import CochainComplex, SemiCx, BisemiCx, tot, tot_bisemi
from .dgla import FDGLA, mc_check, gauge_act, deligne_equivalent, obstruction_lift, lift_along_chain
from .vdiagram import VDiagram, build_V, phi_map, phi_injective, DeligneDescent, descent_deligne_bijection

__version__ = "0.1.0"
