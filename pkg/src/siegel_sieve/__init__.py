"""Class groups of imaginary quadratic fields, zero-dimensional beta sieves on
ideal sequences, and least primes represented by binary quadratic forms."""

__version__ = "0.1.0"

from .characters import RealCharacter, real_characters
from .exceptional import ExceptionalSetup, least_prime, scan, theorem1_report
from .ideals import IdealFactorization, IdealOrdering, PrimeIdeal
from .qfield import ClassGroup, QuadForm, class_group, kronecker
from .sieve import DensityModel, SieveParams, SieveSequence, buchstab_check

__all__ = [
    "ClassGroup", "DensityModel", "ExceptionalSetup", "IdealFactorization", "IdealOrdering",
    "PrimeIdeal", "QuadForm", "RealCharacter", "SieveParams", "SieveSequence",
    "buchstab_check", "class_group", "kronecker", "least_prime", "real_characters", "scan",
    "theorem1_report",
]
