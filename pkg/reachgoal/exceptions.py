# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Exceptions shared across the package
"""
from typing import Optional


class ConfigError(ValueError):
    """A configuration file or override could not be turned into a RunConfig"""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonFiniteLossError(RuntimeError):
    """A loss or gradient became NaN or infinite during training"""

    def __init__(self, loss_name: str, value: float, step: Optional[int] = None):
        self.loss_name = loss_name
        self.value = value
        self.step = step
        where = f" at update {step}" if step is not None else ""
        super().__init__(f"Non-finite {loss_name} loss{where}: {value}")


class CheckpointError(RuntimeError):
    """A checkpoint is unreadable or does not match the requested environment"""


class CurveGridError(RuntimeError):
    """Curve fragments to aggregate were evaluated at different steps"""

    def __init__(self, offending):
        self.offending = list(offending)
        super().__init__(f"Runs with a mismatched step grid: {', '.join(self.offending)}")
