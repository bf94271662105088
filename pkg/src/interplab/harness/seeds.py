"""Hash-based RNG substream derivation."""

from __future__ import annotations

import hashlib
import struct

__all__ = ["derive_seed"]

_DOMAIN = b"interplab.derive_seed.v1"


def _encode(label) -> bytes:
    # type tag + length prefix keeps ("ab",) and ("a", "b") and (1,) vs ("1",) apart
    if isinstance(label, bool):
        raise TypeError("boolean labels are ambiguous; use an int or str")
    if isinstance(label, int):
        body = label.to_bytes((label.bit_length() + 8) // 8 or 1, "little", signed=True)
        tag = b"i"
    elif isinstance(label, str):
        body = label.encode("utf-8")
        tag = b"s"
    else:
        raise TypeError(f"labels must be int or str, got {type(label).__name__}")
    return tag + struct.pack("<I", len(body)) + body


def derive_seed(master_seed: int, labels=()) -> int:
    """64-bit seed from a master seed and an ordered label tuple (BLAKE2b)."""
    h = hashlib.blake2b(digest_size=8, person=b"interplab")
    h.update(_DOMAIN)
    h.update(_encode(int(master_seed)))
    for label in labels:
        h.update(_encode(label))
    return int.from_bytes(h.digest(), "little")
