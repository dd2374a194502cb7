"""NPW1 tensor container: the weight/golden-fixture wire format.

Layout (all integers little-endian):

    magic   4 bytes  "NPW1"
    version u32      1
    count   u32      number of tensors
    then per tensor:
        name_len u16
        name     UTF-8, name_len bytes
        dtype    u8   (0 = 32-bit IEEE float, the only dtype in version 1)
        ndim     u8
        dims     ndim x u32
        payload  prod(dims) x f32, row-major

Writers emit tensors sorted by name so identical contents give identical
bytes.  Values are stored as float32; loading code widens to float64.
"""

import struct

import numpy as np

from .errors import BadMagic, CorruptHeader, TruncatedContainer, UnsupportedFormat

MAGIC = b"NPW1"
VERSION = 1
DTYPE_F32 = 0


def write_container(tensors: dict) -> bytes:
    """Serialize named float arrays (any float dtype; stored as f32)."""
    parts = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype=np.float32)
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValueError(f"tensor name too long: {name!r}")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<BB", DTYPE_F32, arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(arr.tobytes())
    return b"".join(parts)


def read_container(data: bytes) -> dict:
    """Parse container bytes into {name: float32 ndarray}."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic("not an NPW1 container")
    if len(data) < 12:
        raise TruncatedContainer("container ends inside the header")
    version, count = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise UnsupportedFormat(f"NPW1 version {version} not supported")
    offset = 12
    tensors = {}
    for _ in range(count):
        if offset + 2 > len(data):
            raise TruncatedContainer("container ends inside a tensor header")
        (name_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + name_len + 2 > len(data):
            raise TruncatedContainer("container ends inside a tensor header")
        name = data[offset : offset + name_len].decode("utf-8")
        offset += name_len
        dtype, ndim = struct.unpack_from("<BB", data, offset)
        offset += 2
        if dtype != DTYPE_F32:
            raise UnsupportedFormat(f"tensor {name!r} has unknown dtype {dtype}")
        if offset + 4 * ndim > len(data):
            raise TruncatedContainer(f"tensor {name!r} header truncated")
        dims = struct.unpack_from(f"<{ndim}I", data, offset)
        offset += 4 * ndim
        numel = 1
        for d in dims:
            numel *= d
        nbytes = 4 * numel
        if offset + nbytes > len(data):
            raise TruncatedContainer(f"tensor {name!r} payload truncated")
        arr = np.frombuffer(data[offset : offset + nbytes], dtype="<f4").reshape(dims)
        offset += nbytes
        if name in tensors:
            raise CorruptHeader(f"duplicate tensor name {name!r}")
        tensors[name] = arr
    return tensors


def read_container_file(path) -> dict:
    with open(path, "rb") as fh:
        return read_container(fh.read())


def write_container_file(path, tensors: dict):
    with open(path, "wb") as fh:
        fh.write(write_container(tensors))
