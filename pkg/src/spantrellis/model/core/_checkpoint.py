"""Save and restore model parameters in a versioned binary file.

Layout: magic ``b"STCK"``, u16 format version, u32 manifest length, a
UTF-8 JSON manifest (model config plus the name and shape of every
array in tree order), then the arrays as little-endian float64 in
manifest order.
"""

import dataclasses
import json
import logging
import struct
from pathlib import Path

import numpy as np

from spantrellis.utils.errors import ContractViolation

from . import _tree
from ._init import ParamInitializer
from .main import ModelConfig, ModelParams

logger = logging.getLogger(__name__)

MAGIC = b"STCK"
VERSION = 1
_HEADER = struct.Struct("<4sHI")


class CheckpointWriter:
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def write(self, config: ModelConfig, params: ModelParams) -> Path:
        arrays = list(_tree.named_arrays(params))
        manifest = {
            "config": dataclasses.asdict(config),
            "arrays": [{"name": name, "shape": list(a.shape)} for name, a in arrays],
        }
        blob = json.dumps(manifest, sort_keys=True).encode("utf-8")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("wb") as fout:
            fout.write(_HEADER.pack(MAGIC, VERSION, len(blob)))
            fout.write(blob)
            for _, a in arrays:
                fout.write(np.ascontiguousarray(a, dtype="<f8").tobytes())
        logger.info("wrote checkpoint %s (%d arrays)", self.path, len(arrays))
        return self.path


class CheckpointReader:
    """Rebuild (config, params) from a checkpoint file."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def read(self) -> tuple[ModelConfig, ModelParams]:
        """
        Raises:
            ContractViolation: On a wrong magic, unknown version or a
                truncated or inconsistent payload.
        """
        data = self.path.read_bytes()
        if len(data) < _HEADER.size:
            raise ContractViolation(f"{self.path}: truncated checkpoint header.")
        magic, version, size = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ContractViolation(f"{self.path}: not a checkpoint (magic {magic!r}).")
        if version != VERSION:
            raise ContractViolation(f"{self.path}: unsupported checkpoint version {version}, expected {VERSION}.")
        offset = _HEADER.size + size
        manifest = json.loads(data[_HEADER.size:offset].decode("utf-8"))
        config = ModelConfig(**manifest["config"])

        arrays: dict[str, np.ndarray] = {}
        for entry in manifest["arrays"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape, dtype=np.int64))
            end = offset + 8 * count
            if end > len(data):
                raise ContractViolation(f"{self.path}: truncated at array {entry['name']}.")
            arrays[entry["name"]] = np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(shape)
            offset = end
        if offset != len(data):
            raise ContractViolation(f"{self.path}: {len(data) - offset} trailing bytes.")

        skeleton = ParamInitializer(config).build()
        try:
            params = _tree.replace_arrays(skeleton, arrays)
        except (KeyError, ValueError) as exc:
            raise ContractViolation(f"{self.path}: manifest does not match config: {exc}") from exc
        return config, params
