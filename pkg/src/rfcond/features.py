"""Random feature matrices: Fourier and ReLU activations over Gaussian data/weights.

Samples sit in rows, features in columns: A is m x N with
a_{j,k} = phi(<x_j, w_k>).  Fourier features are kept complex end to end;
real-valued targets read off the real part of predictions downstream.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .sampling import TAG_DATA, TAG_WEIGHTS, RngStream, gaussian_matrix

FOURIER = "fourier"
RELU = "relu"
_KIND_CODES = {FOURIER: 0, RELU: 1}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}

_UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class FeatureMeta:
    """Provenance of a feature matrix; fields are None when unknown (e.g. A built
    from externally supplied X, W, or reloaded from a binary dump)."""

    d: int | None
    m: int
    n: int
    gamma: float | None = None
    sigma: float | None = None
    seed: int | None = None
    stream_id: int | None = None


@dataclass
class FeatureMatrix:
    entries: np.ndarray
    kind: str
    meta: FeatureMeta

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise InvalidArgumentError(f"unknown feature kind {self.kind!r}")
        if self.entries.ndim != 2:
            raise InvalidArgumentError("feature entries must be a 2-d array")
        m, n = self.entries.shape
        if m < 1 or n < 1:
            raise InvalidArgumentError("feature matrix must be at least 1x1")
        if (m, n) != (self.meta.m, self.meta.n):
            raise InvalidArgumentError(
                f"entries shape {(m, n)} does not match meta ({self.meta.m}, {self.meta.n})"
            )
        if self.kind == FOURIER:
            dev = np.abs(np.abs(self.entries) - 1.0).max()
            if dev > _UNIT_MODULUS_TOL:
                raise InvalidArgumentError(f"fourier entries must have unit modulus (max dev {dev:.3e})")
        else:
            if np.iscomplexobj(self.entries) and np.abs(self.entries.imag).max() > 0:
                raise InvalidArgumentError("relu entries must be real")
            if self.entries.real.min() < 0:
                raise InvalidArgumentError("relu entries must be non-negative")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def _check_dims(X: np.ndarray, W: np.ndarray) -> None:
    if X.ndim != 2 or W.ndim != 2:
        raise InvalidArgumentError("X and W must be 2-d arrays (columns are points)")
    if X.shape[0] != W.shape[0]:
        raise InvalidArgumentError(
            f"X and W must share the ambient dimension d: got {X.shape[0]} vs {W.shape[0]}"
        )


def fourier_features(X: np.ndarray, W: np.ndarray, meta: FeatureMeta | None = None) -> FeatureMatrix:
    """a_{j,k} = exp(i <x_j, w_k>) for X d x m, W d x N."""
    _check_dims(X, W)
    entries = np.exp(1j * (X.T @ W))
    if meta is None:
        meta = FeatureMeta(d=X.shape[0], m=X.shape[1], n=W.shape[1])
    return FeatureMatrix(entries, FOURIER, meta)


def relu_features(X: np.ndarray, W: np.ndarray, meta: FeatureMeta | None = None) -> FeatureMatrix:
    """a_{j,k} = max(0, <x_j, w_k>)."""
    _check_dims(X, W)
    entries = np.maximum(0.0, X.T @ W)
    if meta is None:
        meta = FeatureMeta(d=X.shape[0], m=X.shape[1], n=W.shape[1])
    return FeatureMatrix(entries, RELU, meta)


def build_features(X: np.ndarray, W: np.ndarray, kind: str, meta: FeatureMeta | None = None) -> FeatureMatrix:
    if kind == FOURIER:
        return fourier_features(X, W, meta)
    if kind == RELU:
        return relu_features(X, W, meta)
    raise InvalidArgumentError(f"unknown feature kind {kind!r}")


def random_features(
    d: int,
    m: int,
    n: int,
    gamma: float,
    sigma: float,
    stream: RngStream,
    kind: str = FOURIER,
) -> tuple[np.ndarray, np.ndarray, FeatureMatrix]:
    """Sample X ~ N(0, gamma^2 I_d) and W ~ N(0, sigma^2 I_d), then build A.

    Data and weights come from fixed substreams of `stream`, so one stream per
    trial reproduces the whole instance.
    """
    X = gaussian_matrix(d, m, gamma**2, stream.substream(TAG_DATA))
    W = gaussian_matrix(d, n, sigma**2, stream.substream(TAG_WEIGHTS))
    meta = FeatureMeta(d=d, m=m, n=n, gamma=gamma, sigma=sigma,
                       seed=stream.seed, stream_id=stream.stream_id)
    return X, W, build_features(X, W, kind, meta)


def normalized(A: FeatureMatrix, mode: str) -> np.ndarray:
    """Scaled copy of the entries: by_rows -> A/sqrt(m), by_cols -> A/sqrt(N)."""
    m, n = A.entries.shape
    if mode == "by_rows":
        return A.entries / np.sqrt(m)
    if mode == "by_cols":
        return A.entries / np.sqrt(n)
    raise InvalidArgumentError(f"unknown normalization mode {mode!r}")


def dump_entries(A: FeatureMatrix, path) -> None:
    """Binary debug dump: 24-byte header (m, N, kind code as little-endian int64)
    followed by row-major interleaved (re, im) float64 entries."""
    m, n = A.entries.shape
    header = struct.pack("<3q", m, n, _KIND_CODES[A.kind])
    payload = np.ascontiguousarray(A.entries.astype(np.complex128)).astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_entries(path) -> FeatureMatrix:
    """Inverse of :func:`dump_entries`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 24:
        raise InvalidArgumentError("feature dump shorter than its 24-byte header")
    m, n, code = struct.unpack("<3q", raw[:24])
    if code not in _CODE_KINDS:
        raise InvalidArgumentError(f"unknown feature kind code {code}")
    expected = 24 + 16 * m * n
    if len(raw) != expected:
        raise InvalidArgumentError(f"feature dump has {len(raw)} bytes, expected {expected}")
    entries = np.frombuffer(raw, dtype="<c16", offset=24).reshape(m, n).astype(np.complex128)
    kind = _CODE_KINDS[code]
    if kind == RELU:
        entries = entries.real.copy()
    return FeatureMatrix(entries, kind, FeatureMeta(d=None, m=m, n=n))
