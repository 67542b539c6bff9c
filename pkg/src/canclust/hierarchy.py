"""Agglomerative hierarchical clustering with Lance-Williams linkage updates.

agglomerate() repeatedly merges the pair of active clusters at minimum
dissimilarity and updates the remaining dissimilarities with the recurrence
for the chosen linkage (single / complete / average / Ward). Node indexing
follows the usual convention: leaves are 0..N-1 and the k-th merge creates
node N+k. Cutting the tree at any height yields a partition, and cuts at
increasing heights are nested.

Ward's update is applied to the supplied dissimilarities directly (treating
them as squared-Euclidean surrogates) and heights are recorded raw; the
similarity stage only consumes relative depth, so the scale does not matter.

Ties at the minimum are broken by the lexicographically smallest pair of
cluster representatives, where a cluster's representative is its minimum
original leaf index. This makes results deterministic and permutation
equivariant.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError

LINKAGES = ("single", "complete", "average", "ward")


@dataclass(frozen=True)
class Dendrogram:
    """Full merge tree over N leaves: exactly N-1 merges with monotone heights."""

    leaf_ids: tuple
    merges: tuple  # of (left_node, right_node, height, size)
    linkage: str

    @property
    def n_leaves(self):
        return len(self.leaf_ids)

    @property
    def heights(self):
        return [m[2] for m in self.merges]

    def to_dict(self):
        return {
            "leaf_ids": list(self.leaf_ids),
            "linkage": self.linkage,
            "merges": [[int(l), int(r), float(h), int(s)] for l, r, h, s in self.merges],
        }

    def to_json(self, path=None):
        doc = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(doc + "\n")
        return doc

    @classmethod
    def from_dict(cls, doc):
        merges = tuple((int(l), int(r), float(h), int(s)) for l, r, h, s in doc["merges"])
        return cls(leaf_ids=tuple(doc["leaf_ids"]), merges=merges, linkage=doc["linkage"])

    @classmethod
    def from_json(cls, text_or_path):
        text = str(text_or_path)
        if not text.lstrip().startswith("{"):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        return cls.from_dict(json.loads(text))

    def leaves_under(self, node):
        """Set of leaf indices contained in a node (leaf or merge index)."""
        n = self.n_leaves
        stack, out = [node], set()
        while stack:
            k = stack.pop()
            if k < n:
                out.add(k)
            else:
                left, right, _, _ = self.merges[k - n]
                stack.extend((left, right))
        return out


def _lw_update(linkage, d_ik, d_jk, d_ij, n_i, n_j, n_k):
    if linkage == "single":
        return min(d_ik, d_jk)
    if linkage == "complete":
        return max(d_ik, d_jk)
    if linkage == "average":
        return (n_i * d_ik + n_j * d_jk) / (n_i + n_j)
    # ward: size-weighted variance-increase form
    n = n_i + n_j + n_k
    return ((n_i + n_k) * d_ik + (n_j + n_k) * d_jk - n_k * d_ij) / n


def agglomerate(dm, linkage):
    """Cluster a DissimilarityMatrix into a Dendrogram under the given linkage."""
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    d = np.array(dm.d, dtype=float)
    n = d.shape[0]
    if n < 2:
        raise DataError("need at least 2 signals to cluster")
    if not np.all(np.isfinite(d)):
        raise DataError("non-finite dissimilarity")

    # active clusters: node id, size, representative (min original leaf index)
    nodes = list(range(n))
    sizes = [1] * n
    reps = list(range(n))
    dist = d.tolist()
    merges = []

    for step in range(n - 1):
        m = len(nodes)
        best = None  # (height, rep_lo, rep_hi, a, b)
        for a in range(m):
            for b in range(a + 1, m):
                lo, hi = (reps[a], reps[b]) if reps[a] < reps[b] else (reps[b], reps[a])
                key = (dist[a][b], lo, hi)
                if best is None or key < (best[0], best[1], best[2]):
                    best = (key[0], lo, hi, a, b)
        height, _, _, a, b = best
        # left child is the cluster with the smaller representative
        if reps[a] > reps[b]:
            a, b = b, a
        new_node = n + step
        new_size = sizes[a] + sizes[b]
        new_rep = min(reps[a], reps[b])
        merges.append((nodes[a], nodes[b], float(height), new_size))

        new_row = []
        for k in range(m):
            if k in (a, b):
                continue
            new_row.append(_lw_update(linkage, dist[a][k], dist[b][k], dist[a][b],
                                      sizes[a], sizes[b], sizes[k]))
        # drop b first so a's index stays valid
        for idx in sorted((a, b), reverse=True):
            del nodes[idx], sizes[idx], reps[idx]
            del dist[idx]
            for row in dist:
                del row[idx]
        nodes.append(new_node)
        sizes.append(new_size)
        reps.append(new_rep)
        for row, v in zip(dist, new_row):
            row.append(v)
        dist.append(new_row + [0.0])

    return Dendrogram(leaf_ids=tuple(dm.signal_ids), merges=tuple(merges), linkage=linkage)


def cut_at(dend, height):
    """Partition the leaves by keeping merges with height <= the cut height.

    Returns a list of leaf-id sets, ordered by each cluster's smallest leaf
    index; the sets are disjoint and cover all leaves.
    """
    if height < 0:
        raise ValueError("cut height must be >= 0")
    n = dend.n_leaves
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    node_root = list(range(n))  # union-find root representing each tree node
    node_root += [None] * (n - 1)
    for k, (left, right, h, _size) in enumerate(dend.merges):
        ra, rb = node_root[left], node_root[right]
        if h <= height:
            ra, rb = find(ra), find(rb)
            parent[rb] = ra
            node_root[n + k] = ra
        else:
            # above the cut: the merge node still needs a root for ancestors,
            # but its children stay in separate clusters
            node_root[n + k] = find(ra)

    groups = {}
    for leaf in range(n):
        groups.setdefault(find(leaf), []).append(leaf)
    clusters = sorted(groups.values(), key=lambda g: g[0])
    return [set(dend.leaf_ids[i] for i in g) for g in clusters]


def restrict(dend, keep_ids):
    """Prune a dendrogram to a subset of its leaves, preserving merge heights.

    Original merges are replayed: a merge survives only when both sides still
    contain kept leaves; single-child internal nodes collapse away. Used for
    comparing captures whose constant-pruned signal sets differ.
    """
    keep = set(keep_ids)
    missing = keep - set(dend.leaf_ids)
    if missing:
        raise DataError(f"leaves not in dendrogram: {sorted(missing)}")
    if len(keep) < 2:
        raise DataError("restriction needs at least 2 leaves")

    new_leaf_ids = tuple(lid for lid in dend.leaf_ids if lid in keep)
    new_index = {lid: i for i, lid in enumerate(new_leaf_ids)}
    k = len(new_leaf_ids)

    n = dend.n_leaves
    # surviving cluster node (in the new tree) for each original node, or None
    survives = [None] * (n + len(dend.merges))
    sizes = [None] * (n + len(dend.merges))
    for i, lid in enumerate(dend.leaf_ids):
        if lid in keep:
            survives[i] = new_index[lid]
            sizes[i] = 1
    new_merges = []
    next_node = k
    for j, (left, right, h, _size) in enumerate(dend.merges):
        a, b = survives[left], survives[right]
        if a is not None and b is not None:
            sz = sizes[left] + sizes[right]
            new_merges.append((a, b, h, sz))
            survives[n + j] = next_node
            sizes[n + j] = sz
            next_node += 1
        elif a is not None:
            survives[n + j] = a
            sizes[n + j] = sizes[left]
        elif b is not None:
            survives[n + j] = b
            sizes[n + j] = sizes[right]
    return Dendrogram(leaf_ids=new_leaf_ids, merges=tuple(new_merges), linkage=dend.linkage)
