"""Versioned binary persistence for built indexes.

File layout: 8-byte magic, little-endian u32 format version, u32-length-
prefixed JSON parameter block, u64-length-prefixed payload holding the
pickled index.  Loading validates the magic and version before touching
the payload, so foreign files fail fast with a clear error.
"""

import io
import json
import pickle
import struct

from ..errors import BuildError
from ..lsh import EuclideanGrid, LshIndex, MinHash1Bit

MAGIC = b"FAIRNNIX"
VERSION = 1


def _params_block(index: LshIndex, id_map=None) -> dict:
    kind = index.kind
    return {
        "id_map": id_map,
        "family": "minhash-1bit" if isinstance(kind, MinHash1Bit) else "euclidean-grid",
        "k": kind.k,
        "w": getattr(kind, "w", None),
        "L": index.L,
        "t_rep": index.t_rep,
        "radius": index.radius,
        "approx_radius": index.approx_radius,
        "seed": index.seed,
        "n": index.n,
    }


def save_index(index: LshIndex, path: str, id_map=None) -> None:
    params = json.dumps(_params_block(index, id_map),
                        sort_keys=True).encode("utf-8")
    payload = pickle.dumps(index, protocol=4)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(params)))
        fh.write(params)
        fh.write(struct.pack("<Q", len(payload)))
        fh.write(payload)


def load_index(path: str) -> LshIndex:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise BuildError(f"{path}: not an index file (bad magic)")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise BuildError(f"{path}: unsupported index version {version}")
        (plen,) = struct.unpack("<I", fh.read(4))
        params = json.loads(fh.read(plen).decode("utf-8"))
        (dlen,) = struct.unpack("<Q", fh.read(8))
        payload = fh.read(dlen)
        if len(payload) != dlen:
            raise BuildError(f"{path}: truncated index payload")
    index = pickle.loads(payload)
    if not isinstance(index, LshIndex) or index.n != params["n"]:
        raise BuildError(f"{path}: payload does not match parameter block")
    return index


def read_params(path: str) -> dict:
    """Parameter block without unpickling the payload."""
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise BuildError(f"{path}: not an index file (bad magic)")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise BuildError(f"{path}: unsupported index version {version}")
        (plen,) = struct.unpack("<I", fh.read(4))
        return json.loads(fh.read(plen).decode("utf-8"))
