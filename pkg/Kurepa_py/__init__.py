from .arithmetic_manager import ArithmeticManager, FactoredInteger, Residue
from .config_manager import ConfigManager
from .data_handler import DataHandler
from .determinant_manager import DeterminantManager
from .exceptions import (CheckpointError, CoprimalityError, DomainError, InconsistencyError,
                         KurepaError, NotInvertibleError, ResourceError)
from .heuristics_manager import HeuristicEstimate, HeuristicsManager
from .identity_manager import DerangementVector, IdentityManager, MatrixFp
from .kurepa_evals import EvaluationManager
from .scan_manager import ScanConfig, ScanManager, ScanRecord
from .sequence_manager import SequenceManager, SequenceValue
from .utils import ReportFormat, Utility

__all__ = [
    "ArithmeticManager",
    "FactoredInteger",
    "Residue",
    "ConfigManager",
    "DataHandler",
    "DeterminantManager",
    "HeuristicEstimate",
    "HeuristicsManager",
    "DerangementVector",
    "IdentityManager",
    "MatrixFp",
    "EvaluationManager",
    "ScanConfig",
    "ScanManager",
    "ScanRecord",
    "SequenceManager",
    "SequenceValue",
    "ReportFormat",
    "Utility",
    "KurepaError",
    "DomainError",
    "ResourceError",
    "NotInvertibleError",
    "CoprimalityError",
    "InconsistencyError",
    "CheckpointError"
]
