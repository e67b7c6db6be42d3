"""Binary and JSON encodings of lattices and constraint masks.

Binary records are little-endian:

    lattice: b"STLT" | u16 version | u32 T | u32 U
             | T*U float64 label (row-major) | T*(U+1) float64 blank
    mask:    b"STMK" | u16 version | u32 T | u32 U | u32 delta_t | u32 delta_u
             | T*U uint8 label mask | T*(U+1) uint8 blank mask

The JSON debug form writes -inf as null.
"""

import json
import struct
from typing import Any

import numpy as np

from spantrellis.utils.errors import ContractViolation

from .main import NEG_INF, ConstraintMask, Lattice

FORMAT_VERSION = 1
LATTICE_MAGIC = b"STLT"
MASK_MAGIC = b"STMK"
_LATTICE_HEADER = struct.Struct("<4sHII")
_MASK_HEADER = struct.Struct("<4sHIIII")
_F8 = np.dtype("<f8")


def _check_header(magic: bytes, version: int, expected: bytes) -> None:
    if magic != expected:
        raise ContractViolation(f"Bad magic {magic!r}, expected {expected!r}.")
    if version != FORMAT_VERSION:
        raise ContractViolation(
            f"Unsupported record version {version}, expected {FORMAT_VERSION}."
        )


class LatticeCodec:
    """Encode and decode Lattice records."""

    @staticmethod
    def to_bytes(lattice: Lattice) -> bytes:
        header = _LATTICE_HEADER.pack(LATTICE_MAGIC, FORMAT_VERSION, lattice.T, lattice.U)
        return (
            header
            + lattice.label_logprob.astype(_F8).tobytes(order="C")
            + lattice.blank_logprob.astype(_F8).tobytes(order="C")
        )

    @staticmethod
    def from_bytes(data: bytes) -> Lattice:
        """Decode a binary lattice record.

        Raises:
            ContractViolation: If the header or payload length is wrong.
        """
        magic, version, T, U = _LATTICE_HEADER.unpack_from(data)
        _check_header(magic, version, LATTICE_MAGIC)
        offset = _LATTICE_HEADER.size
        expected = offset + 8 * (T * U + T * (U + 1))
        if len(data) != expected:
            raise ContractViolation(f"Lattice record has {len(data)} bytes, expected {expected}.")
        label = np.frombuffer(data, dtype=_F8, count=T * U, offset=offset)
        blank = np.frombuffer(data, dtype=_F8, count=T * (U + 1), offset=offset + 8 * T * U)
        return Lattice(label.reshape(T, U), blank.reshape(T, U + 1))

    @staticmethod
    def to_json(lattice: Lattice) -> str:
        return json.dumps(
            {
                "kind": "lattice",
                "version": FORMAT_VERSION,
                "T": lattice.T,
                "U": lattice.U,
                "label_logprob": _matrix_to_json(lattice.label_logprob),
                "blank_logprob": _matrix_to_json(lattice.blank_logprob),
            }
        )

    @staticmethod
    def from_json(text: str) -> Lattice:
        record = json.loads(text)
        _check_header(record["kind"].encode(), record["version"], b"lattice")
        T, U = record["T"], record["U"]
        return Lattice(
            _matrix_from_json(record["label_logprob"], (T, U)),
            _matrix_from_json(record["blank_logprob"], (T, U + 1)),
        )


class MaskCodec:
    """Encode and decode ConstraintMask records."""

    @staticmethod
    def to_bytes(mask: ConstraintMask) -> bytes:
        header = _MASK_HEADER.pack(
            MASK_MAGIC, FORMAT_VERSION, mask.T, mask.U, mask.delta_t, mask.delta_u
        )
        return (
            header
            + mask.label_mask.astype(np.uint8).tobytes(order="C")
            + mask.blank_mask.astype(np.uint8).tobytes(order="C")
        )

    @staticmethod
    def from_bytes(data: bytes) -> ConstraintMask:
        magic, version, T, U, delta_t, delta_u = _MASK_HEADER.unpack_from(data)
        _check_header(magic, version, MASK_MAGIC)
        offset = _MASK_HEADER.size
        expected = offset + T * U + T * (U + 1)
        if len(data) != expected:
            raise ContractViolation(f"Mask record has {len(data)} bytes, expected {expected}.")
        label = np.frombuffer(data, dtype=np.uint8, count=T * U, offset=offset)
        blank = np.frombuffer(data, dtype=np.uint8, count=T * (U + 1), offset=offset + T * U)
        return ConstraintMask(
            label_mask=label.reshape(T, U).astype(bool),
            blank_mask=blank.reshape(T, U + 1).astype(bool),
            delta_t=delta_t,
            delta_u=delta_u,
        )

    @staticmethod
    def to_json(mask: ConstraintMask) -> str:
        return json.dumps(
            {
                "kind": "mask",
                "version": FORMAT_VERSION,
                "T": mask.T,
                "U": mask.U,
                "delta_t": mask.delta_t,
                "delta_u": mask.delta_u,
                "label_mask": mask.label_mask.astype(int).tolist(),
                "blank_mask": mask.blank_mask.astype(int).tolist(),
            }
        )

    @staticmethod
    def from_json(text: str) -> ConstraintMask:
        record = json.loads(text)
        _check_header(record["kind"].encode(), record["version"], b"mask")
        T, U = record["T"], record["U"]
        return ConstraintMask(
            label_mask=np.array(record["label_mask"], dtype=bool).reshape(T, U),
            blank_mask=np.array(record["blank_mask"], dtype=bool).reshape(T, U + 1),
            delta_t=record["delta_t"],
            delta_u=record["delta_u"],
        )


def _matrix_to_json(matrix: np.ndarray) -> list[list[float | None]]:
    return [[None if v == NEG_INF else float(v) for v in row] for row in matrix]


def _matrix_from_json(rows: list[list[Any]], shape: tuple[int, int]) -> np.ndarray:
    values = [[NEG_INF if v is None else float(v) for v in row] for row in rows]
    return np.array(values, dtype=np.float64).reshape(shape)
