"""Feedforward encoder with an evidence head, trained by exact backprop.

Architecture: input → tanh hidden layers → linear embedding, with two
heads on the embedding: a linear evidence head (relu or softplus output,
so evidence is always non-negative) used for classification, and a
linear projection head used only for contrastive pre-training.

Training is plain mini-batch Adam over hand-derived gradients.  A model
is single-owner while being trained; prediction on a snapshot is pure.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .evidential import (
    DirichletOpinion,
    LossBreakdown,
    annealing_coefficient,
    opinion_from_evidence,
    total_loss,
    total_loss_gradient,
)

CHECKPOINT_FORMAT_VERSION = 1


class NonFiniteLossError(RuntimeError):
    """Raised when training produces a NaN/Inf loss; carries diagnostics."""


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    hidden_dims: tuple[int, ...] = (64, 64)
    embedding_dim: int = 32
    num_classes: int = 2
    evidence_activation: str = "relu"  # "relu" | "softplus"
    seed: int = 0
    projection_dim: int = 16

    def __post_init__(self):
        if self.input_dim < 1 or self.embedding_dim < 1 or self.projection_dim < 1:
            raise ValueError("all dimensions must be >= 1")
        if any(d < 1 for d in self.hidden_dims):
            raise ValueError("hidden dims must be >= 1")
        if self.num_classes < 2:
            raise ValueError("need at least 2 classes")
        if self.evidence_activation not in ("relu", "softplus"):
            raise ValueError("evidence_activation must be 'relu' or 'softplus'")
        object.__setattr__(self, "hidden_dims", tuple(int(d) for d in self.hidden_dims))


@dataclass
class TrainHyper:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 64


@dataclass(frozen=True)
class Prediction:
    sample_id: int
    opinion: DirichletOpinion
    predicted_class: int
    true_label: int | None = None

    @property
    def correct(self) -> bool | None:
        if self.true_label is None:
            return None
        return self.predicted_class == self.true_label


class ModelState:
    """Parameters plus Adam moments; mutated in place by training steps."""

    def __init__(self, config: NetworkConfig, params: dict[str, np.ndarray]):
        self.config = config
        self.params = params
        self.adam_m = {k: np.zeros_like(v) for k, v in params.items()}
        self.adam_v = {k: np.zeros_like(v) for k, v in params.items()}
        self.step = 0

    @property
    def encoder_layer_count(self) -> int:
        return len(self.config.hidden_dims) + 1

    def num_params(self) -> int:
        return int(sum(v.size for v in self.params.values()))

    def reset_optimizer(self) -> None:
        """Fresh Adam state; used at the start of each training stage."""
        for k in self.params:
            self.adam_m[k][:] = 0.0
            self.adam_v[k][:] = 0.0
        self.step = 0

    def clone(self) -> "ModelState":
        other = ModelState(self.config, {k: v.copy() for k, v in self.params.items()})
        other.adam_m = {k: v.copy() for k, v in self.adam_m.items()}
        other.adam_v = {k: v.copy() for k, v in self.adam_v.items()}
        other.step = self.step
        return other


def init_model(config: NetworkConfig) -> ModelState:
    """Deterministic init: zero-mean normals scaled by 1/√fan_in, zero biases."""
    rng = np.random.default_rng(config.seed)
    dims = [config.input_dim, *config.hidden_dims, config.embedding_dim]
    params: dict[str, np.ndarray] = {}
    for i in range(len(dims) - 1):
        params[f"enc_w{i}"] = rng.normal(0.0, 1.0 / np.sqrt(dims[i]), size=(dims[i], dims[i + 1]))
        params[f"enc_b{i}"] = np.zeros(dims[i + 1])
    params["head_w"] = rng.normal(
        0.0, 1.0 / np.sqrt(config.embedding_dim), size=(config.embedding_dim, config.num_classes)
    )
    params["head_b"] = np.zeros(config.num_classes)
    params["proj_w"] = rng.normal(
        0.0, 1.0 / np.sqrt(config.embedding_dim), size=(config.embedding_dim, config.projection_dim)
    )
    params["proj_b"] = np.zeros(config.projection_dim)
    return ModelState(config, params)


def _evidence_from_preact(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    # numerically stable softplus
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _evidence_activation_grad(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward_trace(model: ModelState, x: np.ndarray) -> dict:
    """Forward pass keeping every intermediate needed for backprop."""
    cfg = model.config
    if x.shape[-1] != cfg.input_dim:
        raise ValueError(f"expected {cfg.input_dim} input features, got {x.shape[-1]}")
    h = x
    pre: list[np.ndarray] = []
    acts: list[np.ndarray] = [x]
    n_layers = model.encoder_layer_count
    for i in range(n_layers):
        z = h @ model.params[f"enc_w{i}"] + model.params[f"enc_b{i}"]
        pre.append(z)
        h = np.tanh(z) if i < n_layers - 1 else z  # embedding layer is linear
        acts.append(h)
    embedding = h
    z_head = embedding @ model.params["head_w"] + model.params["head_b"]
    evidence = _evidence_from_preact(z_head, cfg.evidence_activation)
    return {
        "pre": pre,
        "acts": acts,
        "embedding": embedding,
        "z_head": z_head,
        "evidence": evidence,
    }


def forward(model: ModelState, x) -> tuple[np.ndarray, np.ndarray]:
    """Embedding and evidence for one sample or a (B, input_dim) batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    trace = _forward_trace(model, np.atleast_2d(x))
    emb, ev = trace["embedding"], trace["evidence"]
    return (emb[0], ev[0]) if single else (emb, ev)


def project(model: ModelState, embedding: np.ndarray) -> np.ndarray:
    """Contrastive projection of encoder embeddings."""
    return embedding @ model.params["proj_w"] + model.params["proj_b"]


def _encoder_backward(
    model: ModelState, trace: dict, d_embedding: np.ndarray, grads: dict[str, np.ndarray]
) -> None:
    """Accumulate encoder gradients from an upstream embedding gradient."""
    n_layers = model.encoder_layer_count
    d_h = d_embedding
    for i in reversed(range(n_layers)):
        if i < n_layers - 1:
            d_z = d_h * (1.0 - np.tanh(trace["pre"][i]) ** 2)
        else:
            d_z = d_h  # linear embedding layer
        grads[f"enc_w{i}"] = grads.get(f"enc_w{i}", 0.0) + trace["acts"][i].T @ d_z
        grads[f"enc_b{i}"] = grads.get(f"enc_b{i}", 0.0) + d_z.sum(axis=0)
        if i > 0:
            d_h = d_z @ model.params[f"enc_w{i}"].T


def supervised_loss_and_grads(
    model: ModelState, x: np.ndarray, y_onehot: np.ndarray, t: int
) -> tuple[LossBreakdown, dict[str, np.ndarray]]:
    """Batch-summed evidential loss and its gradient for every parameter."""
    trace = _forward_trace(model, x)
    if not np.all(np.isfinite(trace["evidence"])):
        raise NonFiniteLossError("forward pass produced non-finite evidence")
    breakdown = total_loss(trace["evidence"], y_onehot, t)
    d_evidence = total_loss_gradient(trace["evidence"], y_onehot, t)
    d_z_head = d_evidence * _evidence_activation_grad(
        trace["z_head"], model.config.evidence_activation
    )
    grads: dict[str, np.ndarray] = {
        "head_w": trace["embedding"].T @ d_z_head,
        "head_b": d_z_head.sum(axis=0),
    }
    _encoder_backward(model, trace, d_z_head @ model.params["head_w"].T, grads)
    return breakdown, grads


def adam_step(model: ModelState, grads: dict[str, np.ndarray], hyper: TrainHyper) -> None:
    """One Adam update over exactly the parameters present in ``grads``."""
    if hyper.learning_rate == 0.0:
        return
    model.step += 1
    b1, b2 = hyper.beta1, hyper.beta2
    bc1 = 1.0 - b1**model.step
    bc2 = 1.0 - b2**model.step
    for name, g in grads.items():
        m = model.adam_m[name]
        v = model.adam_v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        model.params[name] -= hyper.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + hyper.eps)


def train_epoch(
    model: ModelState,
    x: np.ndarray,
    y_onehot: np.ndarray,
    t: int,
    hyper: TrainHyper,
    rng: np.random.Generator,
) -> tuple[ModelState, LossBreakdown]:
    """One shuffled pass; returns the model and the epoch-mean loss terms."""
    x = np.asarray(x, dtype=np.float64)
    y_onehot = np.asarray(y_onehot, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot train on an empty labeled set")
    order = rng.permutation(n)
    mse_sum = 0.0
    kl_sum = 0.0
    for start in range(0, n, hyper.batch_size):
        idx = order[start : start + hyper.batch_size]
        try:
            breakdown, grads = supervised_loss_and_grads(model, x[idx], y_onehot[idx], t)
        except NonFiniteLossError as exc:
            raise NonFiniteLossError(
                f"{exc} (epoch t={t}, batch offset {start}, step {model.step})"
            ) from None
        if not np.isfinite(breakdown.total):
            raise NonFiniteLossError(
                f"non-finite loss {breakdown.total!r} at epoch t={t}, "
                f"batch offset {start}, step {model.step}"
            )
        mse_sum += breakdown.mse_term
        kl_sum += breakdown.kl_term
        scale = 1.0 / idx.shape[0]  # decouple step size from batch size
        adam_step(model, {k: g * scale for k, g in grads.items()}, hyper)
    lam = annealing_coefficient(t)
    return model, LossBreakdown(
        mse_term=mse_sum / n,
        kl_term=kl_sum / n,
        lam=lam,
        total=mse_sum / n + lam * (kl_sum / n),
    )


def predict_batch(
    model: ModelState,
    xs,
    sample_ids=None,
    true_labels=None,
) -> list[Prediction]:
    """Per-sample opinions and argmax-α classes (ties take the lowest index)."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.shape[0] == 0:
        return []
    _, evidence = forward(model, np.atleast_2d(xs))
    if sample_ids is None:
        sample_ids = range(evidence.shape[0])
    preds = []
    for i, (row, sid) in enumerate(zip(evidence, sample_ids)):
        op = opinion_from_evidence(row)
        label = None if true_labels is None else int(true_labels[i])
        preds.append(
            Prediction(
                sample_id=int(sid),
                opinion=op,
                predicted_class=int(np.argmax(op.alpha)),
                true_label=label,
            )
        )
    return preds


# --- parameter flattening (gradient checks, serialization order) ---


def _param_names(model: ModelState) -> list[str]:
    return sorted(model.params.keys())


def get_flat_params(model: ModelState) -> np.ndarray:
    return np.concatenate([model.params[k].reshape(-1) for k in _param_names(model)])


def set_flat_params(model: ModelState, flat: np.ndarray) -> None:
    offset = 0
    for k in _param_names(model):
        size = model.params[k].size
        model.params[k][:] = flat[offset : offset + size].reshape(model.params[k].shape)
        offset += size
    if offset != flat.size:
        raise ValueError("flat vector size does not match model")


def _flat_grads(model: ModelState, grads: dict[str, np.ndarray]) -> np.ndarray:
    out = []
    for k in _param_names(model):
        g = grads.get(k)
        out.append(np.zeros(model.params[k].size) if g is None else np.asarray(g).reshape(-1))
    return np.concatenate(out)


def gradient_check_model(
    model: ModelState,
    x: np.ndarray,
    y_onehot: np.ndarray,
    t: int,
    h: float = 1e-5,
    kink_tol: float = 1e-3,
) -> float:
    """Worst relative error of backprop vs central finite differences.

    Works on the batch-summed loss.  Coordinates where both gradients are
    below 1e-8 in magnitude are skipped.  With a relu evidence head, a
    coordinate is also skipped when either perturbed forward pass puts
    any head pre-activation within ``kink_tol`` of zero or flips its
    sign, since the loss is not differentiable across the kink.
    """
    x = np.asarray(x, dtype=np.float64)
    y_onehot = np.asarray(y_onehot, dtype=np.float64)
    if x.shape[0] > 8:
        raise ValueError("gradient check batches are capped at 8 samples")
    if model.num_params() > 2000:
        raise ValueError("gradient check models are capped at 2000 parameters")

    _, grads = supervised_loss_and_grads(model, x, y_onehot, t)
    analytic = _flat_grads(model, grads)

    relu_head = model.config.evidence_activation == "relu"
    theta = get_flat_params(model)
    worst = 0.0
    for i in range(theta.size):
        orig = theta[i]
        theta[i] = orig + h
        set_flat_params(model, theta)
        trace_p = _forward_trace(model, x)
        loss_p = total_loss(trace_p["evidence"], y_onehot, t).total
        theta[i] = orig - h
        set_flat_params(model, theta)
        trace_m = _forward_trace(model, x)
        loss_m = total_loss(trace_m["evidence"], y_onehot, t).total
        theta[i] = orig
        set_flat_params(model, theta)

        if relu_head:
            zp, zm = trace_p["z_head"], trace_m["z_head"]
            near_kink = min(np.min(np.abs(zp)), np.min(np.abs(zm))) < kink_tol
            crossed = np.any(np.sign(zp) != np.sign(zm))
            if near_kink or crossed:
                continue
        fd = (loss_p - loss_m) / (2.0 * h)
        if abs(analytic[i]) < 1e-8 and abs(fd) < 1e-8:
            continue
        rel = abs(analytic[i] - fd) / max(abs(analytic[i]), abs(fd))
        worst = max(worst, rel)
    return worst


# --- checkpoint I/O ---


def save_checkpoint(model: ModelState, path, stage: str = "finetuned", extra: dict | None = None) -> None:
    """Versioned npz container: config, parameters, optimizer state."""
    meta = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "stage": stage,
        "step": model.step,
        "config": {**asdict(model.config), "hidden_dims": list(model.config.hidden_dims)},
    }
    if extra:
        meta["extra"] = extra
    arrays = {f"param/{k}": v for k, v in model.params.items()}
    arrays.update({f"adam_m/{k}": v for k, v in model.adam_m.items()})
    arrays.update({f"adam_v/{k}": v for k, v in model.adam_v.items()})
    arrays["meta_json"] = np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path) -> tuple[ModelState, dict]:
    """Exact inverse of :func:`save_checkpoint`."""
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta_json"]).decode("utf-8"))
        if meta.get("format_version") != CHECKPOINT_FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version: {meta.get('format_version')!r}")
        cfg_dict = dict(meta["config"])
        cfg_dict["hidden_dims"] = tuple(cfg_dict["hidden_dims"])
        config = NetworkConfig(**cfg_dict)
        params = {k[len("param/"):]: data[k].copy() for k in data.files if k.startswith("param/")}
        model = ModelState(config, params)
        for k in data.files:
            if k.startswith("adam_m/"):
                model.adam_m[k[len("adam_m/"):]] = data[k].copy()
            elif k.startswith("adam_v/"):
                model.adam_v[k[len("adam_v/"):]] = data[k].copy()
        model.step = int(meta["step"])
    return model, meta
