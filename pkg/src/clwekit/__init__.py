"""clwekit: executable sample transformations between LWE, sparse-secret LWE,
CLWE, hCLWE and Gaussian-mixture instances, with the samplers, gadget
constructions, brute-force solver and a statistical harness that checks each
map's distributional contract at desk scale.
"""

from . import distributions, gmm, harness, numerics, pipeline, samplers, serialize, sparse
from .numerics import GaussianParam, TestReport
from .samplers import RngStream, SecretVector

__version__ = "0.1.0"

__all__ = [
    "numerics",
    "samplers",
    "distributions",
    "serialize",
    "pipeline",
    "sparse",
    "gmm",
    "harness",
    "GaussianParam",
    "TestReport",
    "RngStream",
    "SecretVector",
    "__version__",
]
