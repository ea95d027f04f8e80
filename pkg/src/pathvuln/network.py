"""Attention network over bags of path contexts, in plain numpy.

Forward pass per function, given contexts i = 1..n:

    c_i   = [value_emb[start_i] ; path_emb[path_i] ; value_emb[end_i]]
    h_i   = tanh(W @ c_i)                (combined context, width d)
    alpha = softmax over i of h_i . a    (masked at padded slots)
    v     = sum_i alpha_i * h_i          (code vector)
    q     = softmax(v @ tag_emb.T)       (class distribution)

Training minimizes mean cross-entropy of q against the labels, with
inverted dropout applied to h before the attention scores. The backward
pass is exact (analytic); see the matching finite-difference tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllMasked


@dataclass
class ModelParams:
    """All trainable arrays, float64 throughout.

    W is stored (d, 3d) and applied as h = tanh(c @ W.T); tag_emb holds
    one row per class in tag-id order.
    """

    value_emb: np.ndarray  # (num_values, d)
    path_emb: np.ndarray   # (num_paths, d)
    W: np.ndarray          # (d, 3d)
    attention: np.ndarray  # (d,)
    tag_emb: np.ndarray    # (num_tags, d)

    @property
    def dim(self) -> int:
        return self.value_emb.shape[1]

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "value_emb": self.value_emb,
            "path_emb": self.path_emb,
            "W": self.W,
            "attention": self.attention,
            "tag_emb": self.tag_emb,
        }

    def copy(self) -> "ModelParams":
        return ModelParams(**{name: arr.copy() for name, arr in self.arrays().items()})


FIELD_ORDER = ("value_emb", "path_emb", "W", "attention", "tag_emb")


def init_params(num_values: int, num_paths: int, dim: int, *,
                num_tags: int = 2, seed: int = 0) -> ModelParams:
    """Uniform init in [-1/sqrt(d), 1/sqrt(d)) for every array.

    Draw order is fixed (value, path, W, attention, tag) so a seed fully
    determines the starting point.
    """
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(dim)

    def draw(*shape):
        return rng.uniform(-bound, bound, size=shape)

    return ModelParams(
        value_emb=draw(num_values, dim),
        path_emb=draw(num_paths, dim),
        W=draw(dim, 3 * dim),
        attention=draw(dim),
        tag_emb=draw(num_tags, dim),
    )


@dataclass
class Batch:
    """Rectangular id arrays for a batch of bags; mask marks real slots."""

    starts: np.ndarray  # (B, C) int32
    paths: np.ndarray   # (B, C) int32
    ends: np.ndarray    # (B, C) int32
    mask: np.ndarray    # (B, C) bool
    labels: np.ndarray  # (B,) int64

    @property
    def size(self) -> int:
        return self.starts.shape[0]


def pack_bags(bags, *, pad_to: int | None = None) -> Batch:
    """Pad encoded bags to a rectangle (padding id 0, mask False)."""
    width = max(len(b) for b in bags)
    if pad_to is not None:
        width = max(width, pad_to)
    B = len(bags)
    starts = np.zeros((B, width), dtype=np.int32)
    paths = np.zeros((B, width), dtype=np.int32)
    ends = np.zeros((B, width), dtype=np.int32)
    mask = np.zeros((B, width), dtype=bool)
    labels = np.empty(B, dtype=np.int64)
    for row, bag in enumerate(bags):
        n = len(bag)
        starts[row, :n] = bag.starts
        paths[row, :n] = bag.paths
        ends[row, :n] = bag.ends
        mask[row, :n] = True
        labels[row] = bag.label_id
    return Batch(starts=starts, paths=paths, ends=ends, mask=mask, labels=labels)


@dataclass
class ForwardTrace:
    """Intermediates retained for the backward pass."""

    batch: Batch
    h: np.ndarray          # (B, C, d) tanh output, before dropout
    drop: np.ndarray | None  # (B, C, d) inverted-dropout multiplier, or None
    alpha: np.ndarray      # (B, C)
    v: np.ndarray          # (B, d)
    q: np.ndarray          # (B, num_tags)
    loss: float


def _gather_contexts(params: ModelParams, batch: Batch) -> np.ndarray:
    """Assemble (B, C, 3d) context matrix from the embedding tables."""
    return np.concatenate(
        (
            params.value_emb[batch.starts],
            params.path_emb[batch.paths],
            params.value_emb[batch.ends],
        ),
        axis=2,
    )


def masked_attention(scores: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Row-wise softmax over valid slots; padded slots get exactly zero."""
    if not mask.any(axis=1).all():
        rows = np.flatnonzero(~mask.any(axis=1))
        raise AllMasked(f"bag(s) at row(s) {rows.tolist()} have no valid contexts")
    neg = np.where(mask, scores, -np.inf)
    peak = neg.max(axis=1, keepdims=True)
    expo = np.exp(neg - peak)
    expo = np.where(mask, expo, 0.0)
    return expo / expo.sum(axis=1, keepdims=True)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    peak = logits.max(axis=1, keepdims=True)
    shifted = logits - peak
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def forward(
    params: ModelParams,
    batch: Batch,
    *,
    dropout: float = 0.0,
    rng: np.random.Generator | None = None,
) -> ForwardTrace:
    """Run the network over one batch and record intermediates.

    Dropout is inverted (scaling by 1/(1-p) at train time) and applies to
    the combined context vectors before attention. Pass dropout=0.0 for
    inference.
    """
    if dropout and rng is None:
        raise ValueError("dropout requires an rng")
    c = _gather_contexts(params, batch)
    h = np.tanh(c @ params.W.T)  # (B, C, d)
    if dropout:
        keep = rng.random(h.shape) >= dropout
        drop = keep / (1.0 - dropout)
        h_used = h * drop
    else:
        drop = None
        h_used = h
    scores = h_used @ params.attention  # (B, C)
    alpha = masked_attention(scores, batch.mask)
    v = np.einsum("bc,bcd->bd", alpha, h_used)
    logits = v @ params.tag_emb.T
    logq = _log_softmax(logits)
    q = np.exp(logq)
    loss = float(-logq[np.arange(batch.size), batch.labels].mean())
    return ForwardTrace(batch=batch, h=h, drop=drop, alpha=alpha, v=v, q=q, loss=loss)


@dataclass
class Gradients:
    value_emb: np.ndarray
    path_emb: np.ndarray
    W: np.ndarray
    attention: np.ndarray
    tag_emb: np.ndarray

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "value_emb": self.value_emb,
            "path_emb": self.path_emb,
            "W": self.W,
            "attention": self.attention,
            "tag_emb": self.tag_emb,
        }


def backward(params: ModelParams, trace: ForwardTrace) -> Gradients:
    """Exact gradients of the mean cross-entropy for one batch."""
    batch = trace.batch
    B = batch.size
    d = params.dim
    h_used = trace.h if trace.drop is None else trace.h * trace.drop

    onehot = np.zeros_like(trace.q)
    onehot[np.arange(B), batch.labels] = 1.0
    dlogits = (trace.q - onehot) / B  # (B, T)

    dtag = dlogits.T @ trace.v  # (T, d)
    dv = dlogits @ params.tag_emb  # (B, d)

    # v = sum_c alpha * h_used
    dalpha = np.einsum("bd,bcd->bc", dv, h_used)
    dh_used = trace.alpha[:, :, None] * dv[:, None, :]

    # softmax over contexts; padded slots have alpha == 0, killing their terms
    inner = (trace.alpha * dalpha).sum(axis=1, keepdims=True)
    dscores = trace.alpha * (dalpha - inner)

    dattention = np.einsum("bc,bcd->d", dscores, h_used)
    dh_used += dscores[:, :, None] * params.attention[None, None, :]

    dh = dh_used if trace.drop is None else dh_used * trace.drop
    dz = dh * (1.0 - trace.h * trace.h)  # (B, C, d)

    c = _gather_contexts(params, batch)
    flat_dz = dz.reshape(-1, d)
    dW = flat_dz.T @ c.reshape(-1, 3 * d)
    dc = (flat_dz @ params.W).reshape(c.shape)  # (B, C, 3d)

    dvalue = np.zeros_like(params.value_emb)
    dpath = np.zeros_like(params.path_emb)
    np.add.at(dvalue, batch.starts, dc[:, :, :d])
    np.add.at(dpath, batch.paths, dc[:, :, d : 2 * d])
    np.add.at(dvalue, batch.ends, dc[:, :, 2 * d :])

    return Gradients(value_emb=dvalue, path_emb=dpath, W=dW,
                     attention=dattention, tag_emb=dtag)


def predict_proba(params: ModelParams, batch: Batch) -> np.ndarray:
    """Class distribution per bag, dropout off."""
    return forward(params, batch).q
