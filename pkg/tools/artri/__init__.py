from .complexes import ChainMap, ProjComplex, cone, hom_K, minimize, shift, signature
from .knitting import ARComponent, Slice, knit_component, tau_K
from .linalg import Field, Matrix
from .path_algebra import BasicAlgebra, Quiver, build_algebra
from .problem_file import ProblemFile, load_problem, parse_problem
from .quiver_rep import Representation, min_proj_resolution, standard_module
from .shapes import classify, reduced_cone, standard_form

__all__ = [
    "ARComponent", "BasicAlgebra", "ChainMap", "Field", "Matrix", "ProblemFile", "ProjComplex", "Quiver",
    "Representation", "Slice", "build_algebra", "classify", "cone", "hom_K", "knit_component", "load_problem",
    "min_proj_resolution", "minimize", "parse_problem", "reduced_cone", "shift", "signature", "standard_form",
    "standard_module", "tau_K",
]
