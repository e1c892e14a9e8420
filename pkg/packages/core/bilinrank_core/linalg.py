"""
Block-diagonal pseudo-inverse of sparse symmetric PSD matrices.

The normal matrix of the C unknowns is block diagonal up to a permutation:
unknowns that never share a measurement do not couple. The blocks are found as
connected components of the sparsity graph and inverted in batches of equal
size with a symmetric eigendecomposition.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.sparse as sp
from bilinrank_common import Tolerances
from scipy.sparse.csgraph import connected_components


@dataclass
class _BlockGroup:
    index: np.ndarray  # (blocks, size) unknown indices
    pinv: np.ndarray  # (blocks, size, size)


@dataclass
class BlockPseudoInverse:
    """
    Pseudo-inverse of a symmetric PSD matrix with block-diagonal structure.

    Attributes:
        size: Dimension of the matrix
        deficient: First unknown index of every rank-deficient block
    """

    size: int
    groups: List[_BlockGroup] = field(default_factory=list)
    deficient: List[int] = field(default_factory=list)

    @classmethod
    def from_sparse(cls, G: sp.spmatrix, rel: float = Tolerances.BLOCK_PINV_REL) -> "BlockPseudoInverse":
        G = sp.csr_matrix(G)
        size = G.shape[0]
        _, labels = connected_components(G, directed=False)
        order = np.argsort(labels, kind="stable")
        counts = np.bincount(labels)
        block_size = counts[labels[order]]

        result = cls(size=size)
        for s in np.unique(counts):
            members = order[block_size == s].reshape(-1, s)
            # components are listed in label order; members of one label are contiguous
            flat = members.ravel()
            sub = G[flat][:, flat].tocoo()
            sub.sum_duplicates()
            blocks = np.zeros((members.shape[0], s, s))
            blocks[sub.row // s, sub.row % s, sub.col % s] = sub.data
            vals, vecs = np.linalg.eigh(blocks)
            top = np.maximum(vals[:, -1:], 0.0)
            keep = vals > rel * top
            inv = np.where(keep, 1.0 / np.where(keep, vals, 1.0), 0.0)
            pinv = np.einsum("bij,bj,bkj->bik", vecs, inv, vecs)
            result.groups.append(_BlockGroup(members, pinv))
            short = ~np.all(keep, axis=1)
            result.deficient.extend(int(members[b].min()) for b in np.flatnonzero(short))
        result.deficient.sort()
        return result

    @property
    def singular(self) -> bool:
        return bool(self.deficient)

    def apply(self, rhs: np.ndarray) -> np.ndarray:
        """G^+ rhs for a vector (size,) or a matrix (size, c)."""
        rhs = np.asarray(rhs, dtype=float)
        out = np.zeros_like(rhs)
        for group in self.groups:
            part = rhs[group.index]
            if rhs.ndim == 1:
                out[group.index] = np.einsum("bij,bj->bi", group.pinv, part)
            else:
                out[group.index] = np.einsum("bij,bjc->bic", group.pinv, part)
        return out
