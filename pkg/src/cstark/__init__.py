"""Effective structure theory for C*-algebras: exact norms, presentations,
projections, UHF algebras and their K-theory."""
from __future__ import annotations

from .categoricity import Interleaving, interleave, iso_approx, iso_hom
from .concrete import DimChain, Element
from .cstar import (ComputablePoint, CPresentation, DirectLimit, StandardComplex, StarPoly,
                    amplify, matrix_algebra, product, suspend, unitize)
from .effective_sets import (find_point_in_intersection, mvn_semidecide, projections_closed)
from .errors import (CstarkError, DivisibilityError, InputError, ParseError,
                     SupernaturalMismatchSuspected)
from .exact import ExactMatrix, GaussianRational, certified_opnorm
from .ktheory import (align_D, build_D, cone_decide, cone_semidecide, D_of_map, enumerate_projections,
                      G_of_map, groth_kernel_decide, grothendieck, k0, k0_nonunital,
                      k0_to_rational, k1)
from .matrix_fd import mvn_decide_fd
from .presentations import Answer, GpWord, KernelAnswer, SgWord
from .results import Unknown
from .uhf import (Supernatural, UhfCertificate, extract_certificate, limit_norm,
                  presentation_from_dims, presentation_from_supernatural,
                  supernatural_from_certificate, trace)

__version__ = "0.1.0"

__all__ = [
    "align_D",
    "amplify",
    "Answer",
    "build_D",
    "certified_opnorm",
    "ComputablePoint",
    "cone_decide",
    "cone_semidecide",
    "CPresentation",
    "CstarkError",
    "D_of_map",
    "DimChain",
    "DirectLimit",
    "DivisibilityError",
    "Element",
    "enumerate_projections",
    "ExactMatrix",
    "extract_certificate",
    "find_point_in_intersection",
    "G_of_map",
    "GaussianRational",
    "GpWord",
    "groth_kernel_decide",
    "grothendieck",
    "InputError",
    "interleave",
    "Interleaving",
    "iso_approx",
    "iso_hom",
    "k0",
    "k0_nonunital",
    "k0_to_rational",
    "k1",
    "KernelAnswer",
    "limit_norm",
    "matrix_algebra",
    "mvn_decide_fd",
    "mvn_semidecide",
    "ParseError",
    "presentation_from_dims",
    "presentation_from_supernatural",
    "product",
    "projections_closed",
    "SgWord",
    "StandardComplex",
    "StarPoly",
    "Supernatural",
    "supernatural_from_certificate",
    "SupernaturalMismatchSuspected",
    "suspend",
    "trace",
    "UhfCertificate",
    "unitize",
    "Unknown",
]
