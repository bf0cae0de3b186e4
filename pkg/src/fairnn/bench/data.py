"""Dataset handling for the experiment harness.

Three dataset kinds:

  * ``set``    set-valued points under Jaccard similarity (distance
               1 - J); ingested from id-set-lines files, raw tokens are
               interned to dense ids in first-appearance order.
  * ``vector`` dense vectors under Euclidean distance; ingested from CSV
               or from fvecs-style binary files.
  * ``unit``   unit vectors under inner-product similarity (for the
               filter index).
"""

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import BuildError

FORMATS = ("id-set-lines", "dense-vector-csv", "fvecs")


@dataclass
class Dataset:
    name: str
    kind: str                     # "set" | "vector" | "unit"
    items: object                 # list[frozenset[int]] or np.ndarray
    id_map: Optional[list] = None  # interned id -> original token (sets only)
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.items)

    def distance(self, i, j) -> float:
        """Distance between two points (either may be an index or a raw
        point).  For unit data this is 1 - <p, q>."""
        a = self.items[i] if isinstance(i, (int, np.integer)) else i
        b = self.items[j] if isinstance(j, (int, np.integer)) else j
        if self.kind == "set":
            inter = len(a & b)
            union = len(a) + len(b) - inter
            return 1.0 - (inter / union if union else 1.0)
        if self.kind == "unit":
            return 1.0 - float(np.dot(a, b))
        diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
        return float(np.sqrt(np.dot(diff, diff)))


def ingest(path: str, fmt: str, name: Optional[str] = None,
           kind: Optional[str] = None,
           intern: Optional[dict] = None) -> Dataset:
    """Read a dataset file.  ``fmt`` is one of FORMATS; ``kind`` defaults
    to 'set' for id-set-lines and 'vector' otherwise.  ``intern`` seeds
    the token interning table so query files can share a previously built
    dataset's id space."""
    if fmt not in FORMATS:
        raise BuildError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    name = name or path
    if fmt == "id-set-lines":
        interned = dict(intern) if intern else {}
        id_map = [None] * len(interned)
        for tok, i in interned.items():
            id_map[i] = tok
        items = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh):
                tokens = line.split()
                if not tokens:
                    continue
                ids = []
                for tok in tokens:
                    if tok not in interned:
                        interned[tok] = len(id_map)
                        id_map.append(tok)
                    ids.append(interned[tok])
                if len(set(ids)) != len(ids):
                    raise BuildError(f"duplicate token on line {lineno + 1}")
                items.append(frozenset(ids))
        return Dataset(name, kind or "set", items, id_map=id_map)
    if fmt == "dense-vector-csv":
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        return Dataset(name, kind or "vector", arr)
    # fvecs: repeated records of (int32 dim, dim * float32), little endian
    vecs = []
    with open(path, "rb") as fh:
        while True:
            head = fh.read(4)
            if not head:
                break
            (dim,) = struct.unpack("<i", head)
            if dim <= 0:
                raise BuildError(f"bad fvecs dimension {dim}")
            payload = fh.read(4 * dim)
            if len(payload) != 4 * dim:
                raise BuildError("truncated fvecs record")
            vecs.append(np.frombuffer(payload, dtype="<f4").astype(np.float64))
    if vecs and any(len(v) != len(vecs[0]) for v in vecs):
        raise BuildError("fvecs records have mixed dimensions")
    return Dataset(name, kind or "vector", np.array(vecs))


def emit(ds: Dataset, path: str, fmt: str) -> None:
    """Write a dataset back out in one of the ingest formats; re-ingesting
    the result reproduces the dataset."""
    if fmt == "id-set-lines":
        if ds.kind != "set":
            raise BuildError("id-set-lines requires a set dataset")
        id_map = ds.id_map or [str(i) for i in
                               range(1 + max((max(s) for s in ds.items if s),
                                             default=-1))]
        with open(path, "w", encoding="utf-8") as fh:
            for s in ds.items:
                fh.write(" ".join(str(id_map[x]) for x in sorted(s)) + "\n")
    elif fmt == "dense-vector-csv":
        np.savetxt(path, np.asarray(ds.items), delimiter=",")
    elif fmt == "fvecs":
        arr = np.asarray(ds.items, dtype="<f4")
        with open(path, "wb") as fh:
            for row in arr:
                fh.write(struct.pack("<i", len(row)))
                fh.write(row.tobytes())
    else:
        raise BuildError(f"unknown format {fmt!r}")


def knn_distance(ds: Dataset, i: int, rank: int) -> float:
    """Distance from point i to its rank-th nearest other point."""
    d = sorted(ds.distance(i, j) for j in range(len(ds)) if j != i)
    return d[min(rank, len(d)) - 1] if d else float("inf")


def select_queries(ds: Dataset, count: int, knn_rank: int = 40,
                   threshold: float = 0.0, seed: int = 0):
    """Pick query points whose knn_rank-th nearest neighbor lies at
    distance >= threshold, uniformly at random among the eligible points.

    Returns (query_ids, index_ids): the selected queries and the ids of
    the remaining points, which form the indexable set.
    """
    eligible = [i for i in range(len(ds))
                if knn_distance(ds, i, knn_rank) >= threshold]
    if len(eligible) < count:
        raise BuildError(
            f"only {len(eligible)} points satisfy the query threshold")
    rng = np.random.default_rng(seed)
    picked = sorted(int(i) for i in
                    rng.choice(len(eligible), size=count, replace=False))
    query_ids = [eligible[i] for i in picked]
    qset = set(query_ids)
    index_ids = [i for i in range(len(ds)) if i not in qset]
    return query_ids, index_ids


# ---------------------------------------------------------------------------
# synthetic data for scripts and tests


def synthetic_set_dataset(num_clusters: int, per_cluster: int,
                          universe: int = 400, core: int = 20,
                          noise: int = 6, seed: int = 0) -> Dataset:
    """Clustered set-valued data: each cluster shares a random core of
    ``core`` token ids; members add ``noise`` private tokens."""
    rng = np.random.default_rng(seed)
    items = []
    for _ in range(num_clusters):
        base = rng.choice(universe, size=core, replace=False)
        for _ in range(per_cluster):
            extra = rng.choice(universe, size=noise, replace=False)
            items.append(frozenset(int(x) for x in base) |
                         frozenset(int(x) for x in extra))
    return Dataset("synthetic-sets", "set", items)


def synthetic_vector_dataset(num_clusters: int, per_cluster: int, dim: int = 32,
                             spread: float = 0.3, seed: int = 0) -> Dataset:
    """Clustered Euclidean data: gaussian clusters with the given
    within-cluster spread around unit-scale random centers."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(num_clusters):
        center = rng.standard_normal(dim)
        rows.append(center + spread * rng.standard_normal((per_cluster, dim)))
    return Dataset("synthetic-vectors", "vector", np.vstack(rows))


def synthetic_unit_dataset(n: int, dim: int = 64, seed: int = 0) -> Dataset:
    """Uniform random unit vectors."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, dim))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return Dataset("synthetic-unit", "unit", X)
