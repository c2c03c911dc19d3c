import os
import json
import struct
from typing import BinaryIO

import numpy as np

from src.config.run_config import build_run_config
from src.errors import ParseError
from src.log.system_logger import Logger, get_system_logger
from src.pipeline.params import ModelParams
from src.utils.json import dumps_json

LOG: Logger = get_system_logger(__name__)

MAGIC = b"SMCK"
VERSION = 1


def _header(params: ModelParams) -> bytes:
    meta = {
        "config": params.config.to_dict(),
        "dims": list(params.dims),
        "n_speakers": params.n_speakers,
        "n_classes": params.n_classes,
        "speaker_names": list(params.speaker_names),
    }
    return dumps_json(meta, indent=0).encode("utf-8")


def save_checkpoint(path: str, params: ModelParams) -> None:
    """
    Writes a checkpoint:

        "SMCK" | u32 version | u32 meta length | meta JSON (config, dims, ...)
        | u32 tensor count | per tensor: u16 name length | name | u8 ndim
        | u64 dims... | little-endian float64 payload

    All integers are little-endian.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    meta = _header(params)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, len(meta)))
        f.write(meta)
        f.write(struct.pack("<I", len(params.tensors)))
        for name, tensor in params.items():
            encoded = name.encode("utf-8")
            f.write(struct.pack("<H", len(encoded)))
            f.write(encoded)
            f.write(struct.pack("<B", tensor.ndim))
            f.write(struct.pack(f"<{tensor.ndim}Q", *tensor.shape))
            f.write(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    LOG.info(f"Saved checkpoint '{path}' ({params.count()} parameters).")


def _read(f: BinaryIO, size: int, path: str) -> bytes:
    data = f.read(size)
    if len(data) != size:
        raise ParseError("checkpoint is truncated", path=path)
    return data


def load_checkpoint(path: str) -> ModelParams:
    """
    Reads a checkpoint written by `save_checkpoint`.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: On a bad magic, unknown version or truncated file.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"The file '{path}' does not exist.")
    with open(path, "rb") as f:
        if _read(f, 4, path) != MAGIC:
            raise ParseError("not a checkpoint (bad magic)", path=path)
        version, meta_len = struct.unpack("<II", _read(f, 8, path))
        if version != VERSION:
            raise ParseError(f"unsupported checkpoint version {version}", path=path)
        meta = json.loads(_read(f, meta_len, path).decode("utf-8"))
        (count,) = struct.unpack("<I", _read(f, 4, path))
        tensors = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", _read(f, 2, path))
            name = _read(f, name_len, path).decode("utf-8")
            (ndim,) = struct.unpack("<B", _read(f, 1, path))
            shape = struct.unpack(f"<{ndim}Q", _read(f, 8 * ndim, path))
            size = int(np.prod(shape)) if ndim else 1
            payload = _read(f, 8 * size, path)
            tensors[name] = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(shape)
        if f.read(1):
            raise ParseError("trailing bytes after the last tensor", path=path)
    return ModelParams(config=build_run_config(meta["config"]), dims=tuple(meta["dims"]),
                       n_speakers=int(meta["n_speakers"]), n_classes=int(meta["n_classes"]),
                       tensors=tensors, speaker_names=list(meta.get("speaker_names", [])))
