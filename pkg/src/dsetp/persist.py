"""Model files.

Layout::

    DSETP1\\n
    <header length in bytes>\\n
    <JSON header: config, vocabulary, tensor names and shapes>\\n
    <tensors as little-endian float32, in header order>

The header is written with sorted keys so that saving a loaded model
reproduces the original bytes.
"""
from __future__ import annotations

import json
import math

import numpy as np
import torch

from .model import ModelConfig, SetParserNet
from .treebank import Vocabulary

MAGIC = b"DSETP1\n"


class ModelFormatError(ValueError):
    pass


def model_bytes(model: SetParserNet) -> bytes:
    state = model.state_dict()
    header = {
        "format": MAGIC.strip().decode(),
        "config": model.config.to_json(),
        "vocab": model.vocab.to_json(),
        "tensors": [[name, list(t.shape)] for name, t in state.items()],
    }
    text = json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8")
    chunks = [MAGIC, b"%d\n" % len(text), text, b"\n"]
    for t in state.values():
        chunks.append(t.detach().cpu().numpy().astype("<f4").tobytes())
    return b"".join(chunks)


def save_model(model: SetParserNet, path):
    with open(path, "wb") as out:
        out.write(model_bytes(model))


def model_from_bytes(data: bytes) -> SetParserNet:
    if not data.startswith(MAGIC):
        raise ModelFormatError("not a DSETP1 model file (bad magic %r)" % data[:7])
    pos = len(MAGIC)
    eol = data.find(b"\n", pos)
    try:
        size = int(data[pos:eol])
        header = json.loads(data[eol + 1:eol + 1 + size].decode("utf-8"))
    except ValueError as err:
        raise ModelFormatError("DSETP1: corrupt header (%s)" % err) from None
    pos = eol + 1 + size + 1
    missing = {"config", "vocab", "tensors"} - set(header)
    if missing:
        raise ModelFormatError("DSETP1: header lacks %s" % ", ".join(sorted(missing)))
    try:
        config = ModelConfig.from_json(header["config"])
        vocab = Vocabulary.from_json(header["vocab"])
    except (KeyError, TypeError, ValueError) as err:
        raise ModelFormatError("DSETP1: bad header (%s)" % err) from None
    model = SetParserNet(config, vocab)
    state = model.state_dict()
    declared = [name for name, _ in header["tensors"]]
    if declared != list(state):
        raise ModelFormatError("DSETP1: tensor list does not match this model version")
    tensors = {}
    for name, shape in header["tensors"]:
        if list(state[name].shape) != shape:
            raise ModelFormatError("DSETP1: shape mismatch for %s: file %s, model %s"
                                   % (name, shape, list(state[name].shape)))
        count = math.prod(shape)
        end = pos + 4 * count
        if end > len(data):
            raise ModelFormatError("DSETP1: truncated file while reading %s" % name)
        arr = np.frombuffer(data, dtype="<f4", count=count, offset=pos).reshape(shape)
        tensors[name] = torch.from_numpy(arr.astype(np.float32))
        pos = end
    if pos != len(data):
        raise ModelFormatError("DSETP1: %d trailing bytes" % (len(data) - pos))
    model.load_state_dict(tensors)
    model.eval()
    return model


def load_model(path) -> SetParserNet:
    with open(path, "rb") as f:
        return model_from_bytes(f.read())
