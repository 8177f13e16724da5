"""Simulation of the single-control-qubit Shor factoring circuit.

Subpackages cover number theory, problem generation, a sharded statevector
simulator, error models, the analytic output distribution, classical
post-processing and campaign tooling.
"""

from .noise import ErrorConfig, ErrorKind
from .problems import FactoringProblem

__all__ = ["ErrorConfig", "ErrorKind", "FactoringProblem"]
__version__ = "0.1.0"
