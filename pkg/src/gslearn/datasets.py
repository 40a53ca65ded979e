"""Plain-text graph dataset ingestion and split construction.

Input format (the LINQS distribution layout):

* a ``.content`` file, one node per line: ``<id> <v1> ... <vC> <label>``
  separated by tabs (any whitespace is accepted); feature values may be
  0/1 flags or reals,
* a ``.cites`` file, one undirected edge per line: ``<id> <id>``.

Node ids become dense indices in first-appearance order of the content
file; labels become class indices in lexicographic order of the label
strings. Edges naming unknown ids are dropped (counted and logged),
self-loops are dropped, duplicates collapse.

A parsed dataset can be persisted as a small binary cache (little-endian:
an 8-byte magic, uint32 counts, float64 features, uint32 label ids and
edge endpoints, plus length-prefixed UTF-8 name blocks) to skip re-parsing.
"""

import logging
import math
import struct
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .fileio import atomic_write_bytes
from .graphs import GroundTruthGraph, preprocess_ground_truth
from .linalg import Matrix, Rng

logger = logging.getLogger(__name__)

CACHE_MAGIC = b"GRLDATA1"


@dataclass(frozen=True)
class Dataset:
    """Node features `x` (n x c), one-hot labels `y` (n x f), an optional
    reference graph, and (once assigned) disjoint train/val/test index sets."""

    name: str
    x: Matrix
    y: Matrix
    gt: Optional[GroundTruthGraph] = None
    train_idx: Optional[np.ndarray] = None
    val_idx: Optional[np.ndarray] = None
    test_idx: Optional[np.ndarray] = None
    label_names: Tuple[str, ...] = ()
    dropped_edges: int = 0
    zero_feature_rows: int = 0

    @property
    def n_nodes(self) -> int:
        return self.x.shape[0]

    @property
    def n_features(self) -> int:
        return self.x.shape[1]

    @property
    def n_classes(self) -> int:
        return self.y.shape[1]

    def labels(self) -> np.ndarray:
        """Per-node class indices."""
        return np.argmax(self.y, axis=1)


def load_linqs(content_path, cites_path=None, name: Optional[str] = None,
               row_normalize: bool = False) -> Dataset:
    """Parse a content/cites file pair into a Dataset (without splits).
    `cites_path=None` loads features and labels only, leaving the reference
    graph absent. `row_normalize=True` rescales each nonzero feature row to
    sum to 1."""
    ids = {}
    feature_rows = []
    label_strings = []
    width = None
    with open(content_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            tokens = line.split()
            if len(tokens) < 3:
                raise ValueError(
                    f"{content_path}:{lineno}: expected <id> <features...> <label>, "
                    f"got {len(tokens)} fields")
            node_id, feats, label = tokens[0], tokens[1:-1], tokens[-1]
            if node_id in ids:
                raise ValueError(f"{content_path}:{lineno}: duplicate node id {node_id!r}")
            if width is None:
                width = len(feats)
            elif len(feats) != width:
                raise ValueError(
                    f"{content_path}:{lineno}: {len(feats)} feature values, "
                    f"expected {width}")
            try:
                feature_rows.append([float(v) for v in feats])
            except ValueError as exc:
                raise ValueError(f"{content_path}:{lineno}: bad feature value ({exc})") from None
            ids[node_id] = len(ids)
            label_strings.append(label)
    if not ids:
        raise ValueError(f"{content_path}: no nodes found")

    n = len(ids)
    x = np.array(feature_rows, dtype=np.float64)
    classes = sorted(set(label_strings))
    class_index = {c: k for k, c in enumerate(classes)}
    y = np.zeros((n, len(classes)))
    for i, lab in enumerate(label_strings):
        y[i, class_index[lab]] = 1.0

    if row_normalize:
        sums = x.sum(axis=1, keepdims=True)
        x = np.divide(x, sums, out=x.copy(), where=sums > 0.0)

    zero_rows = int(np.count_nonzero(x.sum(axis=1) == 0.0))
    if zero_rows:
        logger.info("%s: %d nodes have all-zero feature rows", content_path, zero_rows)

    gt = None
    dropped = 0
    if cites_path is not None:
        edges = []
        with open(cites_path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                tokens = line.split()
                if len(tokens) != 2:
                    raise ValueError(
                        f"{cites_path}:{lineno}: expected two node ids, got {len(tokens)}")
                a, b = tokens
                if a in ids and b in ids:
                    edges.append((ids[a], ids[b]))
                else:
                    dropped += 1
        if dropped:
            logger.info("%s: dropped %d edges naming unknown node ids", cites_path, dropped)
        gt = preprocess_ground_truth(edges, n)

    if name is None:
        name = str(content_path)
    return Dataset(name=name, x=x, y=y, gt=gt, label_names=tuple(classes),
                   dropped_edges=dropped, zero_feature_rows=zero_rows)


@dataclass(frozen=True)
class SplitSpec:
    """How to carve train/val/test index sets out of a dataset.

    kind 'planetoid': `train_per_class` nodes per class in node order, the
    first `val_count` remaining nodes for validation, the last `test_count`
    nodes for testing. kind 'count': seeded random disjoint draws of
    `train_count`/`val_count`/`test_count` nodes. kind 'label-rate': a fixed
    test (and validation) set drawn first from the seed, then
    ceil(rate * n) stratified training nodes from the remaining pool, so
    changing the rate never changes the test set.
    """

    kind: str = "planetoid"
    seed: int = 0
    train_per_class: int = 20
    train_count: Optional[int] = None
    val_count: Optional[int] = None
    test_count: Optional[int] = None
    rate: Optional[float] = None

    def resolved_val_count(self) -> int:
        if self.val_count is not None:
            return self.val_count
        return 500 if self.kind in ("planetoid", "label-rate") else 0

    def resolved_test_count(self) -> int:
        return self.test_count if self.test_count is not None else 1000


def _stratified_budget(pool_labels: np.ndarray, n_classes: int, budget: int) -> np.ndarray:
    """Largest-remainder allocation of `budget` over the classes present in
    the pool, proportional to pool class counts; every populated class gets
    at least one slot when the budget allows."""
    counts = np.bincount(pool_labels, minlength=n_classes)
    present = np.flatnonzero(counts)
    quota = budget * counts / counts.sum()
    alloc = np.floor(quota).astype(np.int64)
    remainder = quota - alloc
    short = budget - int(alloc.sum())
    for cls in np.argsort(-remainder, kind="stable")[:short]:
        alloc[cls] += 1
    if budget >= present.size:
        for cls in present:
            if alloc[cls] == 0:
                alloc[cls] = 1
                donor = int(np.argmax(alloc))
                alloc[donor] -= 1
    alloc = np.minimum(alloc, counts)
    return alloc


def make_split(ds: Dataset, spec: SplitSpec) -> Dataset:
    """Return a copy of `ds` with train/val/test index sets assigned."""
    n = ds.n_nodes
    labels = ds.labels()
    val_count = spec.resolved_val_count()
    test_count = spec.resolved_test_count()

    if spec.kind == "planetoid":
        taken = np.zeros(n, dtype=bool)
        per_class = {}
        for i in range(n):
            cls = int(labels[i])
            if per_class.get(cls, 0) < spec.train_per_class:
                per_class[cls] = per_class.get(cls, 0) + 1
                taken[i] = True
        short = [c for c in range(ds.n_classes)
                 if per_class.get(c, 0) < spec.train_per_class and np.any(labels == c)]
        if short:
            raise ValueError(
                f"make_split: classes {short} have fewer than "
                f"{spec.train_per_class} nodes")
        train = np.flatnonzero(taken)
        rest = np.flatnonzero(~taken)
        if val_count > rest.size:
            raise ValueError(f"make_split: validation set of {val_count} infeasible")
        val = rest[:val_count]
        tail = np.arange(n - test_count, n)
        if test_count > n or taken[tail].any() or np.isin(tail, val).any():
            raise ValueError(
                f"make_split: test set of the last {test_count} nodes overlaps "
                f"train/validation (n={n})")
        test = tail
    elif spec.kind == "count":
        if spec.train_count is None:
            raise ValueError("make_split: kind 'count' needs train_count")
        sizes = (spec.train_count, val_count, test_count)
        if any(s < 0 for s in sizes) or sizes[0] == 0:
            raise ValueError(f"make_split: bad split sizes {sizes}")
        if sum(sizes) > n:
            raise ValueError(f"make_split: split sizes {sizes} exceed n={n}")
        perm = Rng(spec.seed).permutation(n)
        train = np.sort(perm[:sizes[0]])
        val = np.sort(perm[sizes[0]:sizes[0] + sizes[1]])
        test = np.sort(perm[sizes[0] + sizes[1]:sum(sizes)])
    elif spec.kind == "label-rate":
        if spec.rate is None or not 0.0 < spec.rate < 1.0:
            raise ValueError(f"make_split: label rate must be in (0, 1), got {spec.rate}")
        budget = math.ceil(spec.rate * n)
        perm = Rng(spec.seed).permutation(n)
        if test_count + val_count + budget > n:
            raise ValueError(
                f"make_split: rate {spec.rate} with test={test_count}, "
                f"val={val_count} infeasible for n={n}")
        test = np.sort(perm[:test_count])
        val = np.sort(perm[test_count:test_count + val_count])
        pool = perm[test_count + val_count:]
        alloc = _stratified_budget(labels[pool], ds.n_classes, budget)
        picked = []
        for cls in range(ds.n_classes):
            members = pool[labels[pool] == cls]
            picked.extend(members[:alloc[cls]])
        train = np.sort(np.array(picked, dtype=np.int64))
    else:
        raise ValueError(f"make_split: unknown kind {spec.kind!r}")

    if train.size == 0:
        raise ValueError("make_split: empty training set")
    return replace(ds, train_idx=np.asarray(train, dtype=np.int64),
                   val_idx=np.asarray(val, dtype=np.int64),
                   test_idx=np.asarray(test, dtype=np.int64))


def downsample(ds: Dataset, n: int, seed: int = 0) -> Dataset:
    """Uniform random node subset without replacement; features, labels and
    the reference graph restrict to the induced subgraph and indices are
    re-densified (kept in ascending original order). Any previously assigned
    splits are cleared."""
    if n > ds.n_nodes:
        raise ValueError(f"downsample: n={n} exceeds dataset size {ds.n_nodes}")
    keep = np.sort(Rng(seed).permutation(ds.n_nodes)[:n])
    gt = None
    if ds.gt is not None:
        sub = ds.gt.binary[np.ix_(keep, keep)]
        ii, jj = np.nonzero(np.triu(sub, k=1))
        gt = preprocess_ground_truth(list(zip(ii.tolist(), jj.tolist())), n)
    return replace(ds, x=ds.x[keep], y=ds.y[keep], gt=gt,
                   train_idx=None, val_idx=None, test_idx=None)


def _pack_names(names) -> bytes:
    blob = struct.pack("<I", len(names))
    for s in names:
        raw = s.encode("utf-8")
        blob += struct.pack("<I", len(raw)) + raw
    return blob


def _unpack_names(blob: bytes, offset: int):
    (count,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    names = []
    for _ in range(count):
        (ln,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        names.append(blob[offset:offset + ln].decode("utf-8"))
        offset += ln
    return names, offset


def save_cache(ds: Dataset, path) -> None:
    """Serialize the parsed dataset (not its splits) to the binary cache
    format described in the module docstring."""
    n, c, f = ds.n_nodes, ds.n_features, ds.n_classes
    if ds.gt is not None:
        ii, jj = np.nonzero(np.triu(ds.gt.binary, k=1))
        edges = np.stack([ii, jj], axis=1).astype("<u4")
    else:
        edges = np.zeros((0, 2), dtype="<u4")
    blob = bytearray()
    blob += CACHE_MAGIC
    blob += struct.pack("<5I", n, c, f, edges.shape[0], 1 if ds.gt is not None else 0)
    blob += _pack_names([ds.name])
    blob += _pack_names(list(ds.label_names))
    blob += np.ascontiguousarray(ds.x, dtype="<f8").tobytes()
    blob += ds.labels().astype("<u4").tobytes()
    blob += edges.tobytes()
    atomic_write_bytes(path, bytes(blob))


def load_cache(path) -> Dataset:
    """Load a dataset cache written by `save_cache`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != CACHE_MAGIC:
        raise ValueError(f"load_cache: {path} is not a dataset cache")
    n, c, f, n_edges, has_gt = struct.unpack_from("<5I", blob, 8)
    offset = 8 + 20
    (name,), offset = _unpack_names(blob, offset)
    label_names, offset = _unpack_names(blob, offset)
    x = np.frombuffer(blob, dtype="<f8", count=n * c, offset=offset)
    x = x.astype(np.float64).reshape(n, c)
    offset += 8 * n * c
    label_ids = np.frombuffer(blob, dtype="<u4", count=n, offset=offset).astype(np.int64)
    offset += 4 * n
    edges = np.frombuffer(blob, dtype="<u4", count=2 * n_edges, offset=offset)
    edges = edges.astype(np.int64).reshape(n_edges, 2)
    y = np.zeros((n, f))
    y[np.arange(n), label_ids] = 1.0
    gt = None
    if has_gt:
        gt = preprocess_ground_truth([(int(i), int(j)) for i, j in edges], n)
    return Dataset(name=name, x=x, y=y, gt=gt, label_names=tuple(label_names),
                   zero_feature_rows=int(np.count_nonzero(x.sum(axis=1) == 0.0)))
