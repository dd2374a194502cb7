"""Minimal RIFF/WAVE reader and writer.

Reads PCM 16/24/32-bit integer and 32-bit IEEE float files with any channel
count; integer samples are scaled by 1/2^(bits-1).  Writing always emits
32-bit float, one chunk, no metadata.  Samples are kept planar as a
(channels, frames) float64 array.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptHeader, IoFailure, UnsupportedFormat

_PCM = 1
_IEEE_FLOAT = 3
_EXTENSIBLE = 0xFFFE


@dataclass
class AudioBuffer:
    sample_rate: int
    samples: np.ndarray  # (channels, frames) float64

    @property
    def channels(self):
        return self.samples.shape[0]

    @property
    def frames(self):
        return self.samples.shape[1]


def read_wav(path) -> AudioBuffer:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (size,) = struct.unpack_from("<I", data, offset + 4)
        body = data[offset + 8 : offset + 8 + size]
        if len(body) < size:
            raise CorruptHeader(f"{path}: chunk {chunk_id!r} truncated")
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body, path)
        elif chunk_id == b"data":
            payload = body
        offset += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or payload is None:
        raise CorruptHeader(f"{path}: missing fmt or data chunk")

    tag, channels, rate, bits = fmt
    if channels < 1:
        raise CorruptHeader(f"{path}: channel count {channels}")
    if tag == _IEEE_FLOAT and bits == 32:
        flat = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    elif tag == _PCM and bits == 16:
        flat = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 2.0**15
    elif tag == _PCM and bits == 32:
        flat = np.frombuffer(payload, dtype="<i4").astype(np.float64) / 2.0**31
    elif tag == _PCM and bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8)
        raw = raw[: (len(raw) // 3) * 3].reshape(-1, 3).astype(np.int32)
        vals = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        vals = (vals ^ 0x800000) - 0x800000  # sign-extend 24 -> 32 bits
        flat = vals.astype(np.float64) / 2.0**23
    else:
        raise UnsupportedFormat(f"{path}: format tag {tag}, {bits}-bit not supported")

    frames = len(flat) // channels
    planar = flat[: frames * channels].reshape(frames, channels).T.copy()
    return AudioBuffer(sample_rate=rate, samples=planar)


def _parse_fmt(body, path):
    if len(body) < 16:
        raise CorruptHeader(f"{path}: fmt chunk too small")
    tag, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
    if tag == _EXTENSIBLE:
        if len(body) < 40:
            raise CorruptHeader(f"{path}: extensible fmt chunk too small")
        (sub_tag,) = struct.unpack_from("<H", body, 24)
        tag = sub_tag
    return tag, channels, rate, bits


def write_wav(path, buf: AudioBuffer):
    """Write a 32-bit float WAV; samples are interleaved on disk."""
    samples = np.asarray(buf.samples, dtype=np.float64)
    if samples.ndim != 2:
        raise ValueError("samples must be (channels, frames)")
    channels, frames = samples.shape
    interleaved = samples.T.astype("<f4").tobytes()
    block = channels * 4
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(interleaved)),
            b"WAVE",
            b"fmt ",
            struct.pack("<I", 16),
            struct.pack(
                "<HHIIHH", _IEEE_FLOAT, channels, buf.sample_rate,
                buf.sample_rate * block, block, 32,
            ),
            b"data",
            struct.pack("<I", len(interleaved)),
        ]
    )
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(interleaved)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
