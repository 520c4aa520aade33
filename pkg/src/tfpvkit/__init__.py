"""Structural singular-perturbation analysis of mass-action reaction networks."""

from importlib import resources

from .core import NetworkMatrices, Reaction, ReactionNetwork, build_matrices, jacobian_eval, laplacian, rhs_eval
from .errors import AnalysisError, CrnError, InputError, NumericalError
from .exactlin import CharPoly, RationalMatrix, char_poly, extreme_rays, hurwitz_stable, kernel_basis, rank
from .graph import StructureSummary, structure, subnetwork
from .parser import emit_report, parse, parse_file, serialize

__version__ = "0.1.0"

FIXTURES = ("compinh", "ex35", "futile", "futile_rev", "inflow3", "kinase", "lin3", "minus", "mm_irrev", "mm_rev", "net1")


def load_fixture(name: str) -> ReactionNetwork:
    """Parse one of the bundled example networks by name (e.g. ``"mm_rev"``)."""
    text = resources.files(__package__).joinpath("fixtures", f"{name}.crn").read_text(encoding="utf-8")
    return parse(text)


__all__ = [
    "AnalysisError",
    "CharPoly",
    "CrnError",
    "FIXTURES",
    "InputError",
    "NetworkMatrices",
    "NumericalError",
    "RationalMatrix",
    "Reaction",
    "ReactionNetwork",
    "StructureSummary",
    "build_matrices",
    "char_poly",
    "emit_report",
    "extreme_rays",
    "hurwitz_stable",
    "jacobian_eval",
    "kernel_basis",
    "laplacian",
    "load_fixture",
    "parse",
    "parse_file",
    "rank",
    "rhs_eval",
    "serialize",
    "structure",
    "subnetwork",
]
