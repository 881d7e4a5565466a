"""
Error Types
===========
Exception hierarchy shared by every module.

The CLI maps these onto exit codes:
  ConfigError                      -> 1 (usage)
  EdgeListParseError, ClusteringParseError, OSError -> 2 (I/O / parse)
  GraphDomainError, ContractViolationError          -> 3 (contract)
"""


class ClusterConnectivityError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ClusterConnectivityError, ValueError):
    """Invalid configuration value or command-line usage."""


class _FileParseError(ClusterConnectivityError, ValueError):
    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class EdgeListParseError(_FileParseError):
    """Malformed line in an edge-list file."""


class ClusteringParseError(_FileParseError):
    """Malformed or duplicate line in a clustering file."""


class GraphDomainError(ClusterConnectivityError, ValueError):
    """Node ids out of range, empty node sets or partition/graph mismatch."""


class ContractViolationError(ClusterConnectivityError):
    """A precondition of an algorithm was violated by its caller."""


class InfeasiblePartitionError(ContractViolationError):
    """Block edge counts exceed the number of available node pairs."""
