"""Model layers: embedding, conv block, pairwise additive self-attention,
dense softmax head, and the full classifier that composes them.

Each layer caches whatever its backward pass needs on the instance, so a
model is single-writer during training (forward immediately followed by
backward). Gradients accumulate into Parameter.grad.
"""

from dataclasses import dataclass, asdict, fields

import numpy as np

from . import tensor as T
from .tensor import Parameter


class AttentionDomainError(ValueError):
    """Too few context vectors for the attended-set policy."""


class VocabularyError(ValueError):
    """Token id outside the embedding table."""


NUM_LANG_TAGS = 4  # one-hot width for HIN/ENG/O/EMT


@dataclass
class ModelConfig:
    vocab_size: int
    embed_dim: int = 200
    filters: int = 200
    kernel: int = 8
    stride: int = 1
    pool: int = 2
    pool_stride: int = 2
    attn_hidden: int = 64
    include_self: bool = False
    score_sigmoid: bool = True
    attention_enabled: bool = True
    global_pool: bool = False
    max_len: int = 48
    n_classes: int = 3
    lang_features: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


def glorot_uniform(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class EmbeddingLayer:
    """Token id -> embedding row lookup. Row 0 is PAD, frozen at zero."""

    def __init__(self, vocab_size, dim, rng):
        table = rng.uniform(-0.05, 0.05, size=(vocab_size, dim))
        table[0] = 0.0
        self.table = Parameter(table)

    def forward(self, ids):
        ids = np.asarray(ids, dtype=np.int64)
        n = self.table.shape[0]
        if ids.size and (ids.min() < 0 or ids.max() >= n):
            raise VocabularyError(
                f"token id out of range [0, {n}): {ids[(ids < 0) | (ids >= n)][0]}")
        self._ids = ids
        return self.table.value[ids]

    def backward(self, dX):
        ids = self._ids
        keep = ids != 0  # PAD never receives gradient
        np.add.at(self.table.grad, ids[keep], dX[keep])


class ConvBlock:
    """conv1d -> ReLU -> max-pool, i.e. the local-context extractor."""

    def __init__(self, in_dim, n_filters, kernel, stride, pool, pool_stride,
                 global_pool, rng):
        self.kernel = kernel
        self.stride = stride
        self.pool = pool
        self.pool_stride = pool_stride
        self.global_pool = global_pool
        self.filters = Parameter(glorot_uniform(
            rng, (n_filters, kernel, in_dim), kernel * in_dim, n_filters))
        self.bias = Parameter(np.zeros(n_filters))

    def out_len(self, u):
        v = (u - self.kernel) // self.stride + 1
        if self.global_pool:
            return 1
        return (v - self.pool) // self.pool_stride + 1

    def forward(self, X):
        self._X = X
        self._Z = T.conv1d(X, self.filters.value, self.bias.value, self.stride)
        self._R = T.relu(self._Z)
        pool = self._R.shape[0] if self.global_pool else self.pool
        stride = 1 if self.global_pool else self.pool_stride
        self._pool_args = (pool, stride)
        return T.maxpool1d(self._R, pool, stride)

    def backward(self, dC):
        pool, stride = self._pool_args
        dR = T.maxpool1d_backward(dC, self._R, pool, stride)
        dZ = T.relu_backward(dR, self._Z)
        dX, dF, dB = T.conv1d_backward(dZ, self._X, self.filters.value, self.stride)
        self.filters.grad += dF
        self.bias.grad += dB
        return dX


class SelfAttentionLayer:
    """Pairwise additive self-attention over context vectors.

    For each position t, every attended position t' gets a score
    sigma(W_a . tanh(c_t W_t + c_t' W_c + b_t) + b_a); scores are
    softmax-normalized over t' and used to average the c_t' into a_t.
    The a_t are concatenated in sequence order.
    """

    def __init__(self, dim, hidden, include_self, score_sigmoid, rng):
        self.include_self = include_self
        self.score_sigmoid = score_sigmoid
        self.W_t = Parameter(glorot_uniform(rng, (dim, hidden), dim, hidden))
        self.W_c = Parameter(glorot_uniform(rng, (dim, hidden), dim, hidden))
        self.b_t = Parameter(np.zeros(hidden))
        self.W_a = Parameter(glorot_uniform(rng, (hidden, 1), hidden, 1))
        self.b_a = Parameter(np.zeros(1))

    def forward(self, C):
        v = C.shape[0]
        min_v = 1 if self.include_self else 2
        if v < min_v:
            raise AttentionDomainError(
                f"need at least {min_v} context vectors, got {v}")
        mask = np.ones((v, v), dtype=bool)
        if not self.include_self:
            np.fill_diagonal(mask, False)
        Tq = C @ self.W_t.value          # [v, h] query side
        Kc = C @ self.W_c.value          # [v, h] key side
        H = np.tanh(Tq[:, None, :] + Kc[None, :, :] + self.b_t.value)  # [v,v,h]
        E = H @ self.W_a.value[:, 0] + self.b_a.value[0]               # [v,v]
        S = T.sigmoid(E) if self.score_sigmoid else E
        logits = np.where(mask, S, -np.inf)
        Q = T.softmax(logits)            # rows sum to 1 over the attended set
        A = Q @ C                        # [v, dim]
        self._cache = (C, mask, H, S, Q)
        self.weights = Q
        return A.ravel()

    def backward(self, dG):
        C, mask, H, S, Q = self._cache
        v, dim = C.shape
        dA = dG.reshape(v, dim)
        dC = Q.T @ dA
        dQ = dA @ C.T
        dS = T.softmax_backward(dQ, Q)
        dE = T.sigmoid_backward(dS, S) if self.score_sigmoid else dS
        dE = np.where(mask, dE, 0.0)
        self.W_a.grad[:, 0] += np.einsum("tuh,tu->h", H, dE)
        self.b_a.grad[0] += dE.sum()
        dH = dE[:, :, None] * self.W_a.value[:, 0]
        dPre = dH * (1.0 - H * H)
        dTq = dPre.sum(axis=1)
        dKc = dPre.sum(axis=0)
        self.b_t.grad += dPre.sum(axis=(0, 1))
        self.W_t.grad += C.T @ dTq
        self.W_c.grad += C.T @ dKc
        dC += dTq @ self.W_t.value.T + dKc @ self.W_c.value.T
        return dC


class DenseHead:
    """Linear map to class logits plus softmax."""

    def __init__(self, in_dim, n_classes, rng):
        self.W = Parameter(glorot_uniform(rng, (in_dim, n_classes), in_dim, n_classes))
        self.b = Parameter(np.zeros(n_classes))

    def forward(self, G):
        self._G = G
        logits = G @ self.W.value + self.b.value
        self._probs = T.softmax(logits)
        return self._probs

    def backward(self, dlogits):
        """Takes the gradient at the pre-softmax logits."""
        self.W.grad += np.outer(self._G, dlogits)
        self.b.grad += dlogits
        return dlogits @ self.W.value.T

    def backward_from_probs(self, dprobs):
        return self.backward(T.softmax_backward(dprobs, self._probs))


class HCMSModel:
    """Embedding -> ConvBlock -> (self-attention | flatten) -> DenseHead."""

    def __init__(self, config: ModelConfig, seed=0):
        cfg = config
        self.config = cfg
        rng = np.random.default_rng(seed)
        in_dim = cfg.embed_dim + (NUM_LANG_TAGS if cfg.lang_features else 0)
        self.embedding = EmbeddingLayer(cfg.vocab_size, cfg.embed_dim, rng)
        self.conv = ConvBlock(in_dim, cfg.filters, cfg.kernel, cfg.stride,
                              cfg.pool, cfg.pool_stride, cfg.global_pool, rng)
        self.attention = None
        if cfg.attention_enabled:
            self.attention = SelfAttentionLayer(
                cfg.filters, cfg.attn_hidden, cfg.include_self,
                cfg.score_sigmoid, rng)
        self._v = self.conv.out_len(max(cfg.max_len, cfg.kernel))
        self.head = DenseHead(self._v * cfg.filters, cfg.n_classes, rng)

    def parameters(self):
        params = {
            "embedding.table": self.embedding.table,
            "conv.filters": self.conv.filters,
            "conv.bias": self.conv.bias,
        }
        if self.attention is not None:
            params.update({
                "attention.W_t": self.attention.W_t,
                "attention.W_c": self.attention.W_c,
                "attention.b_t": self.attention.b_t,
                "attention.W_a": self.attention.W_a,
                "attention.b_a": self.attention.b_a,
            })
        params["head.W"] = self.head.W
        params["head.b"] = self.head.b
        return params

    def zero_grad(self):
        for p in self.parameters().values():
            p.zero_grad()

    def _fit_length(self, ids, lang_onehot):
        """Right-pad with PAD (or truncate) to the model's fixed length.

        With global pooling the head width is length-independent, so
        sequences keep their natural length (padded to the kernel only).
        """
        if self.config.global_pool:
            L = max(len(ids), self.config.kernel)
        else:
            L = max(self.config.max_len, self.config.kernel)
        ids = list(ids)[:L]
        pad = L - len(ids)
        padded = np.asarray(ids + [0] * pad, dtype=np.int64)
        lang = None
        if self.config.lang_features:
            if lang_onehot is None:
                lang = np.zeros((L, NUM_LANG_TAGS))
            else:
                lang = np.asarray(lang_onehot, dtype=np.float64)[:L]
                lang = np.vstack([lang, np.zeros((L - lang.shape[0], NUM_LANG_TAGS))])
        return padded, lang

    def forward(self, token_ids, lang_onehot=None):
        ids, lang = self._fit_length(token_ids, lang_onehot)
        X = self.embedding.forward(ids)
        if lang is not None:
            X = np.hstack([X, lang])
        C = self.conv.forward(X)
        if self.attention is not None:
            G = self.attention.forward(C)
        else:
            G = C.ravel()
        return self.head.forward(G)

    def backward(self, dlogits):
        """Backward from the gradient at the pre-softmax logits."""
        dG = self.head.backward(dlogits)
        if self.attention is not None:
            dC = self.attention.backward(dG)
        else:
            dC = dG.reshape(-1, self.config.filters)
        dX = self.conv.backward(dC)
        if self.config.lang_features:
            dX = dX[:, :self.config.embed_dim]
        self.embedding.backward(dX)

    def predict(self, token_ids, lang_onehot=None):
        return int(np.argmax(self.forward(token_ids, lang_onehot)))
