"""Minimal feedforward network core: parameter storage, forward/backward
passes for fully-connected stacks, Adam, gradient checking, and a binary
checkpoint format.

Everything is float64 numpy. Layers are described by `LayerDef` records and
parameters live in a flat, ordered `ParamSet` keyed by "<layer>.W" and
"<layer>.b". There is no graph autodiff: each layer stack has a hand-written
backward pass, validated against central finite differences.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

CHECKPOINT_MAGIC = "A3CTP-TENSORS"
CHECKPOINT_VERSION = 1

ACTIVATIONS = ("linear", "tanh", "relu", "sigmoid")


class ShapeError(ValueError):
    """Raised when tensor shapes do not line up."""


class NonFiniteError(FloatingPointError):
    """Raised when an operation produces NaN or Inf."""


@dataclass
class LayerDef:
    """One fully-connected layer: y = act(x @ W + b)."""

    name: str
    fan_in: int
    fan_out: int
    activation: str = "linear"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


class ParamSet:
    """Flat, ordered map of named float64 tensors plus an update counter.

    Iteration order is insertion order, which makes serialization and
    gradient bookkeeping deterministic.
    """

    def __init__(self, tensors: dict[str, np.ndarray] | None = None, version: int = 0):
        self.tensors: dict[str, np.ndarray] = {}
        self.version = version
        if tensors:
            for name, t in tensors.items():
                self.tensors[name] = np.asarray(t, dtype=np.float64)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def __setitem__(self, name: str, value: np.ndarray) -> None:
        self.tensors[name] = np.asarray(value, dtype=np.float64)

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __iter__(self):
        return iter(self.tensors)

    def names(self) -> list[str]:
        return list(self.tensors)

    def copy(self) -> "ParamSet":
        return ParamSet({k: v.copy() for k, v in self.tensors.items()}, self.version)

    def zeros_like(self) -> "ParamSet":
        return ParamSet({k: np.zeros_like(v) for k, v in self.tensors.items()}, 0)

    def allclose(self, other: "ParamSet", atol: float = 0.0) -> bool:
        if self.names() != other.names():
            return False
        return all(np.allclose(self[k], other[k], atol=atol) for k in self)

    def equal_bits(self, other: "ParamSet") -> bool:
        if self.names() != other.names():
            return False
        return all(np.array_equal(self[k], other[k]) for k in self)

    def add_scaled(self, other: "ParamSet", scale: float) -> None:
        """In-place self += scale * other, matching keys required."""
        for k in self:
            self.tensors[k] += scale * other[k]

    def global_norm(self) -> float:
        total = 0.0
        for t in self.tensors.values():
            total += float(np.sum(t * t))
        return float(np.sqrt(total))

    # -- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        extra = {"version": str(self.version)}
        return _tensors_to_bytes(self.tensors, extra)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "ParamSet":
        tensors, extra = _tensors_from_bytes(blob)
        return cls(tensors, version=int(extra.get("version", "0")))

    def save(self, path) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "ParamSet":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())


def _tensors_to_bytes(tensors: dict[str, np.ndarray], extra: dict[str, str]) -> bytes:
    """Versioned header (magic, format version, scalar fields, tensor
    manifest) followed by raw little-endian float64 data in manifest order.
    """
    buf = io.BytesIO()
    header = [f"{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION}"]
    for k, v in extra.items():
        header.append(f"field {k} {v}")
    header.append(f"tensors {len(tensors)}")
    for name, t in tensors.items():
        dims = "x".join(str(d) for d in t.shape) if t.shape else "scalar"
        header.append(f"tensor {name} {dims}")
    header.append("end-header")
    buf.write(("\n".join(header) + "\n").encode("ascii"))
    for t in tensors.values():
        buf.write(np.ascontiguousarray(t, dtype="<f8").tobytes())
    return buf.getvalue()


def _tensors_from_bytes(blob: bytes) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    end = blob.index(b"end-header\n") + len(b"end-header\n")
    lines = blob[:end].decode("ascii").splitlines()
    if not lines[0].startswith(CHECKPOINT_MAGIC):
        raise ValueError("bad magic in tensor blob")
    extra: dict[str, str] = {}
    manifest: list[tuple[str, tuple[int, ...]]] = []
    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "field":
            extra[parts[1]] = " ".join(parts[2:])
        elif parts[0] == "tensor":
            name = parts[1]
            dims = () if parts[2] == "scalar" else tuple(int(d) for d in parts[2].split("x"))
            manifest.append((name, dims))
    tensors: dict[str, np.ndarray] = {}
    offset = end
    for name, dims in manifest:
        count = int(np.prod(dims)) if dims else 1
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=offset).astype(np.float64)
        tensors[name] = arr.reshape(dims)
        offset += count * 8
    return tensors, extra


# -- initialization -------------------------------------------------------


def init_layers(layers: list[LayerDef], rng: np.random.Generator) -> ParamSet:
    """Uniform init in +-1/sqrt(fan_in) for weights, zero biases."""
    params = ParamSet()
    for layer in layers:
        bound = 1.0 / np.sqrt(layer.fan_in)
        params[f"{layer.name}.W"] = rng.uniform(-bound, bound, size=(layer.fan_in, layer.fan_out))
        params[f"{layer.name}.b"] = np.zeros(layer.fan_out)
    return params


# -- forward / backward ---------------------------------------------------


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "linear":
        return z
    if activation == "tanh":
        return np.tanh(z)
    if activation == "relu":
        return np.maximum(0.0, z)
    if activation == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    raise ValueError(activation)


def _activate_grad(a: np.ndarray, z: np.ndarray, activation: str) -> np.ndarray:
    # Derivative w.r.t. z, expressed where possible via the output a.
    if activation == "linear":
        return np.ones_like(z)
    if activation == "tanh":
        return 1.0 - a * a
    if activation == "relu":
        return (z > 0.0).astype(np.float64)
    if activation == "sigmoid":
        return a * (1.0 - a)
    raise ValueError(activation)


def forward_mlp(params: ParamSet, x: np.ndarray, layers: list[LayerDef]):
    """Run a stack of fully-connected layers.

    x may be a single observation (1-d) or a batch (2-d, rows are samples).
    Returns (output, cache); the cache carries every intermediate needed by
    backward_mlp.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[1] != layers[0].fan_in:
        raise ShapeError(
            f"input width {h.shape[1]} does not match fan-in {layers[0].fan_in}"
        )
    cache = {"input": h, "pre": [], "post": [h]}
    for layer in layers:
        z = h @ params[f"{layer.name}.W"] + params[f"{layer.name}.b"]
        h = _activate(z, layer.activation)
        cache["pre"].append(z)
        cache["post"].append(h)
    if not np.all(np.isfinite(h)):
        raise NonFiniteError("non-finite activations in forward pass")
    cache["layers"] = layers
    cache["single"] = single
    cache["weights"] = [params[f"{l.name}.W"] for l in layers]
    return (h[0] if single else h), cache


def backward_mlp(cache, d_out: np.ndarray, grads: ParamSet | None = None):
    """Backward pass matching a forward_mlp cache.

    d_out is dLoss/d(output). Returns (d_input, grads) where grads holds
    dLoss/dparam for each layer parameter. If `grads` is given, parameter
    gradients are accumulated into it.
    """
    layers = cache["layers"]
    d = np.asarray(d_out, dtype=np.float64)
    if cache["single"] and d.ndim == 1:
        d = d[None, :]
    if grads is None:
        grads = ParamSet()
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        z = cache["pre"][i]
        a = cache["post"][i + 1]
        x = cache["post"][i]
        if d.shape != z.shape:
            raise ShapeError("output-gradient shape does not match cache")
        dz = d * _activate_grad(a, z, layer.activation)
        dW = x.T @ dz
        db = dz.sum(axis=0)
        wkey, bkey = f"{layer.name}.W", f"{layer.name}.b"
        if wkey in grads:
            grads.tensors[wkey] += dW
            grads.tensors[bkey] += db
        else:
            grads[wkey] = dW
            grads[bkey] = db
        d = dz @ cache["weights"][i].T
    d_input = d[0] if cache["single"] else d
    return d_input, grads


# -- Adam -----------------------------------------------------------------


@dataclass
class AdamState:
    """Shared Adam accumulators mirroring a ParamSet."""

    m: ParamSet
    v: ParamSet
    step: int = 0
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: ParamSet, lr: float = 1e-4, beta1: float = 0.9,
                   beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return cls(m=params.zeros_like(), v=params.zeros_like(), step=0,
                   lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def copy(self) -> "AdamState":
        return AdamState(self.m.copy(), self.v.copy(), self.step,
                         self.lr, self.beta1, self.beta2, self.eps)

    def to_bytes(self) -> bytes:
        tensors = {f"m:{k}": v for k, v in self.m.tensors.items()}
        tensors.update({f"v:{k}": v for k, v in self.v.tensors.items()})
        extra = {
            "step": str(self.step),
            "lr": repr(self.lr),
            "beta1": repr(self.beta1),
            "beta2": repr(self.beta2),
            "eps": repr(self.eps),
        }
        return _tensors_to_bytes(tensors, extra)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "AdamState":
        tensors, extra = _tensors_from_bytes(blob)
        m = ParamSet({k[2:]: v for k, v in tensors.items() if k.startswith("m:")})
        v = ParamSet({k[2:]: v for k, v in tensors.items() if k.startswith("v:")})
        return cls(m=m, v=v, step=int(extra["step"]), lr=float(extra["lr"]),
                   beta1=float(extra["beta1"]), beta2=float(extra["beta2"]),
                   eps=float(extra["eps"]))

    def save(self, path) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "AdamState":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())


def adam_step(params: ParamSet, grads: ParamSet, state: AdamState) -> None:
    """One Adam update with bias correction, in place on params and state.

    Increments params.version by exactly 1.
    """
    if params.names() != state.m.names():
        raise ShapeError("optimizer state does not mirror params")
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    for k in params:
        g = grads[k]
        if g.shape != params[k].shape:
            raise ShapeError(f"gradient shape mismatch for {k}")
        state.m.tensors[k] = b1 * state.m[k] + (1.0 - b1) * g
        state.v.tensors[k] = b2 * state.v[k] + (1.0 - b2) * (g * g)
        m_hat = state.m[k] / (1.0 - b1 ** t)
        v_hat = state.v[k] / (1.0 - b2 ** t)
        params.tensors[k] = params[k] - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    params.version += 1


def clip_global_norm(grads: ParamSet, max_norm: float) -> float:
    """Scale all gradients so the global L2 norm is at most max_norm.
    Returns the pre-clip norm."""
    norm = grads.global_norm()
    if max_norm > 0.0 and norm > max_norm:
        scale = max_norm / norm
        for k in grads:
            grads.tensors[k] *= scale
    return norm


# -- gradient checking ----------------------------------------------------


@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    passed: bool
    per_param: dict[str, float] = field(default_factory=dict)


def gradient_check(params: ParamSet, loss_fn, grad_fn, tolerance: float = 1e-4,
                   h: float = 1e-5) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    loss_fn(params) -> scalar loss; grad_fn(params) -> ParamSet of analytic
    gradients. Every parameter entry is perturbed individually.
    """
    analytic = grad_fn(params)
    per_param: dict[str, float] = {}
    worst = ("", 0.0)
    for k in params:
        base = params[k]
        num = np.zeros_like(base)
        flat = base.reshape(-1)
        num_flat = num.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            lp = loss_fn(params)
            flat[i] = orig - h
            lm = loss_fn(params)
            flat[i] = orig
            num_flat[i] = (lp - lm) / (2.0 * h)
        a = analytic[k]
        denom = np.maximum(np.abs(a) + np.abs(num), 1e-6)
        rel = float(np.max(np.abs(a - num) / denom)) if a.size else 0.0
        per_param[k] = rel
        if rel > worst[1]:
            worst = (k, rel)
    return GradCheckReport(max_rel_error=worst[1], worst_param=worst[0],
                           passed=worst[1] < tolerance, per_param=per_param)
