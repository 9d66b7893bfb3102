# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
HDF5 checkpoints of named networks plus the goal memory
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict

import h5py
import numpy as np

from reachgoal.exceptions import CheckpointError
from reachgoal.numcore.network import NetParams, NetSpec
from reachgoal.settings import CHECKPOINT_FORMAT

logger = logging.getLogger(__file__)

REQUIRED_ATTRIBUTES = ("env", "obs_dim", "action_dim", "tau_reach", "log_temperature", "step")


@dataclass
class Checkpoint:
    """Everything a trained run needs to be evaluated or inspected again"""
    attributes: Dict[str, Any]
    networks: Dict[str, NetParams] = field(default_factory=dict)
    memory_entries: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    memory_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))


def save_checkpoint(path: str, checkpoint: Checkpoint):
    """
    Write a checkpoint, replacing any existing file.

    Args:
        path: Destination file
        checkpoint: The contents to write
    """
    missing = [name for name in REQUIRED_ATTRIBUTES if name not in checkpoint.attributes]
    if missing:
        raise ValueError(f"Checkpoint is missing attributes {missing}")
    with h5py.File(path, "w") as hdffile:
        hdffile.attrs["format"] = CHECKPOINT_FORMAT
        for name, value in checkpoint.attributes.items():
            hdffile.attrs[name] = value
        networks = hdffile.create_group("networks")
        for name, params in checkpoint.networks.items():
            group = networks.create_group(name)
            group.attrs["layer_sizes"] = np.array(params.spec.layer_sizes, dtype=np.int64)
            group.create_dataset("params", data=params.flat)
        memory = hdffile.create_group("memory")
        memory.create_dataset("entries", data=np.asarray(checkpoint.memory_entries, dtype=np.float64))
        memory.create_dataset("weights", data=np.asarray(checkpoint.memory_weights, dtype=np.float64))
    logger.info("Wrote checkpoint %s", path)


def _attribute(value):
    if isinstance(value, bytes):
        return value.decode("utf-8")
    if isinstance(value, np.generic):
        return value.item()
    return value


def load_checkpoint(path: str) -> Checkpoint:
    """
    Read a checkpoint written by save_checkpoint.

    Args:
        path: The checkpoint file

    Returns:
        The checkpoint contents

    Raises:
        CheckpointError: If the file cannot be opened or does not carry the expected format header
    """
    try:
        hdffile = h5py.File(path, mode="r")
    except OSError as err:
        raise CheckpointError(f"Cannot open checkpoint '{path}'") from err

    with hdffile:
        file_format = _attribute(hdffile.attrs.get("format", ""))
        if file_format != CHECKPOINT_FORMAT:
            raise CheckpointError(f"Checkpoint '{path}' has format '{file_format}', expected '{CHECKPOINT_FORMAT}'")
        attributes = {name: _attribute(value) for name, value in hdffile.attrs.items() if name != "format"}
        missing = [name for name in REQUIRED_ATTRIBUTES if name not in attributes]
        if missing:
            raise CheckpointError(f"Checkpoint '{path}' is missing attributes {missing}")
        try:
            networks = {
                name: NetParams(NetSpec(tuple(group.attrs["layer_sizes"])), group["params"][:])
                for name, group in hdffile["networks"].items()
            }
            entries = hdffile["memory/entries"][:]
            weights = hdffile["memory/weights"][:]
        except (KeyError, ValueError) as err:
            raise CheckpointError(f"Checkpoint '{path}' is incomplete: {err}") from err
    return Checkpoint(attributes=attributes, networks=networks, memory_entries=entries, memory_weights=weights)
