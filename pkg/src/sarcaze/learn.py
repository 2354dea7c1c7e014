"""Classifiers trained from first principles on numpy arrays.

Gaussian naive Bayes, L2 logistic regression (full-batch gradient
descent), linear SVM (Pegasos-style per-example subgradient steps), a
one-hidden-layer sigmoid network, and multi-instance logistic regression
whose bag probability combines instance probabilities by noisy-OR.

Conventions shared by every trainer:

* labels are +1 / -1; targets for the probabilistic models are (y+1)/2
* training is deterministic given the data and a TrainConfig (the seed
  drives every random draw)
* a probability of exactly 0.5 predicts -1 (the majority class)
* objectives are tracked per epoch; ten consecutive increases abort with
  Diverged
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Diverged, InvalidConfig, SingleClassTraining

_P_CLIP = 1e-12
_VAR_FLOOR = 1e-9
_DIVERGENCE_PATIENCE = 10


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    epochs: int = 300
    batch_size: int = 0
    seed: int = 0
    hidden_units: int = 8

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidConfig(f"learning_rate {self.learning_rate} must be > 0")
        if not self.l2 > 0:
            raise InvalidConfig(f"l2 {self.l2} must be > 0")
        if self.epochs < 1:
            raise InvalidConfig(f"epochs {self.epochs} must be >= 1")
        if self.batch_size < 0:
            raise InvalidConfig(f"batch_size {self.batch_size} must be >= 0 (0 = full batch)")
        if self.hidden_units < 1:
            raise InvalidConfig(f"hidden_units {self.hidden_units} must be >= 1")


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        if not (np.isfinite(self.weights).all() and math.isfinite(self.bias)):
            raise Diverged("non-finite linear model parameters")


@dataclass(frozen=True, eq=False)
class GNBModel:
    priors: dict[int, float]
    means: dict[int, np.ndarray]
    variances: dict[int, np.ndarray]


@dataclass(frozen=True, eq=False)
class MLPModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float

    def __post_init__(self):
        finite = (
            np.isfinite(self.w1).all()
            and np.isfinite(self.b1).all()
            and np.isfinite(self.w2).all()
            and math.isfinite(self.b2)
        )
        if not finite:
            raise Diverged("non-finite network parameters")


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softplus(z):
    # log(1 + e^z) without overflow
    z = np.asarray(z, dtype=float)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _check_classes(y: np.ndarray):
    present = set(np.unique(y).tolist())
    if present - {1, -1}:
        raise InvalidConfig(f"labels must be 1 or -1, got {sorted(present)}")
    if present != {1, -1}:
        raise SingleClassTraining(f"training labels cover {sorted(present)}; need both 1 and -1")


def _as_xy(vectors, labels):
    X = np.asarray(vectors, dtype=float)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise InvalidConfig(f"matrix {X.shape} and labels {y.size} are inconsistent")
    _check_classes(y)
    return X, y


class _DivergenceWatch:
    def __init__(self, trace):
        self.prev = math.inf
        self.streak = 0
        self.trace = trace

    def step(self, value: float):
        if not math.isfinite(value):
            raise Diverged(f"objective became {value}")
        if self.trace is not None:
            self.trace.append(value)
        self.streak = self.streak + 1 if value > self.prev else 0
        if self.streak >= _DIVERGENCE_PATIENCE:
            raise Diverged(f"objective rose for {self.streak} consecutive epochs")
        self.prev = value


# --- Gaussian naive Bayes -------------------------------------------------


def train_gnb(vectors, labels) -> GNBModel:
    """Per-class maximum-likelihood Gaussians with a 1e-9 variance floor."""
    X, y = _as_xy(vectors, labels)
    priors: dict[int, float] = {}
    means: dict[int, np.ndarray] = {}
    variances: dict[int, np.ndarray] = {}
    for cls in (1, -1):
        rows = X[y == cls]
        priors[cls] = rows.shape[0] / X.shape[0]
        means[cls] = rows.mean(axis=0)
        variances[cls] = np.maximum(rows.var(axis=0), _VAR_FLOOR)
    return GNBModel(priors=priors, means=means, variances=variances)


def gnb_log_posteriors(model: GNBModel, vectors) -> dict[int, np.ndarray]:
    X = np.atleast_2d(np.asarray(vectors, dtype=float))
    out = {}
    for cls in (1, -1):
        var = model.variances[cls]
        log_density = -0.5 * (
            np.log(2.0 * math.pi * var) + (X - model.means[cls]) ** 2 / var
        ).sum(axis=1)
        out[cls] = math.log(model.priors[cls]) + log_density
    return out

def predict_gnb(model: GNBModel, vector) -> int:
    scores = gnb_log_posteriors(model, vector)
    return 1 if scores[1][0] > scores[-1][0] else -1


def predict_gnb_matrix(model: GNBModel, vectors) -> np.ndarray:
    scores = gnb_log_posteriors(model, vectors)
    return np.where(scores[1] > scores[-1], 1, -1)


# --- logistic regression --------------------------------------------------


def logistic_objective(weights, bias, X, y, l2: float) -> float:
    """Mean logistic loss plus the (l2/2)||w||^2 penalty; the bias is not
    penalized."""
    margins = y * (X @ weights + bias)
    return float(_softplus(-margins).mean() + 0.5 * l2 * float(weights @ weights))


def logistic_gradient(weights, bias, X, y, l2: float):
    z = X @ weights + bias
    dz = -y * sigmoid(-y * z) / X.shape[0]
    return X.T @ dz + l2 * weights, float(dz.sum())


def train_logreg(vectors, labels, config: TrainConfig | None = None, trace=None) -> LinearModel:
    """Full-batch gradient descent on the L2-regularized logistic loss."""
    X, y = _as_xy(vectors, labels)
    config = config or TrainConfig()
    w = np.zeros(X.shape[1])
    b = 0.0
    watch = _DivergenceWatch(trace)
    for _ in range(config.epochs):
        watch.step(logistic_objective(w, b, X, y, config.l2))
        grad_w, grad_b = logistic_gradient(w, b, X, y, config.l2)
        w = w - config.learning_rate * grad_w
        b = b - config.learning_rate * grad_b
    return LinearModel(weights=w, bias=b)


def decision_values(model: LinearModel, vectors) -> np.ndarray:
    X = np.atleast_2d(np.asarray(vectors, dtype=float))
    return X @ model.weights + model.bias


def predict_linear(model: LinearModel, vector) -> int:
    return 1 if float(decision_values(model, vector)[0]) > 0.0 else -1


def predict_linear_matrix(model: LinearModel, vectors) -> np.ndarray:
    return np.where(decision_values(model, vectors) > 0.0, 1, -1)


def probability(model: LinearModel, vector) -> float:
    return float(sigmoid(decision_values(model, vector))[0])


# --- linear SVM -----------------------------------------------------------


def svm_objective(weights, bias, X, y, l2: float) -> float:
    margins = y * (X @ weights + bias)
    return float(np.maximum(0.0, 1.0 - margins).mean() + 0.5 * l2 * float(weights @ weights))


def train_svm(vectors, labels, config: TrainConfig | None = None, trace=None) -> LinearModel:
    """Per-example subgradient descent on the primal hinge objective with
    the step schedule eta_t = 1/(l2*t) and seeded per-epoch shuffling."""
    X, y = _as_xy(vectors, labels)
    config = config or TrainConfig(epochs=100)
    rng = np.random.default_rng(config.seed)
    w = np.zeros(X.shape[1])
    b = 0.0
    watch = _DivergenceWatch(trace)
    t = 0
    for _ in range(config.epochs):
        for i in rng.permutation(X.shape[0]):
            t += 1
            eta = 1.0 / (config.l2 * t)
            scale = 1.0 - eta * config.l2
            if y[i] * (X[i] @ w + b) < 1.0:
                w = scale * w + eta * y[i] * X[i]
                b = b + eta * y[i]
            else:
                w = scale * w
        watch.step(svm_objective(w, b, X, y, config.l2))
    return LinearModel(weights=w, bias=b)


# --- feed-forward network -------------------------------------------------


def _mlp_forward(model: MLPModel, X):
    hidden = sigmoid(X @ model.w1 + model.b1)
    z = hidden @ model.w2 + model.b2
    return hidden, z


def mlp_objective(model: MLPModel, X, y) -> float:
    _, z = _mlp_forward(model, np.asarray(X, dtype=float))
    t = (np.asarray(y) + 1) / 2.0
    return float((t * _softplus(-z) + (1.0 - t) * _softplus(z)).mean())


def mlp_gradient(model: MLPModel, X, y):
    X = np.asarray(X, dtype=float)
    t = (np.asarray(y) + 1) / 2.0
    hidden, z = _mlp_forward(model, X)
    dz = (sigmoid(z) - t) / X.shape[0]
    dw2 = hidden.T @ dz
    db2 = float(dz.sum())
    dhidden = np.outer(dz, model.w2) * hidden * (1.0 - hidden)
    dw1 = X.T @ dhidden
    db1 = dhidden.sum(axis=0)
    return dw1, db1, dw2, db2


def train_mlp(vectors, labels, config: TrainConfig | None = None, trace=None) -> MLPModel:
    """One hidden sigmoid layer, sigmoid output, cross-entropy loss,
    uniform(-0.5, 0.5) init, full-batch gradient descent."""
    X, y = _as_xy(vectors, labels)
    config = config or TrainConfig()
    rng = np.random.default_rng(config.seed)
    h = config.hidden_units
    model = MLPModel(
        w1=rng.uniform(-0.5, 0.5, (X.shape[1], h)),
        b1=rng.uniform(-0.5, 0.5, h),
        w2=rng.uniform(-0.5, 0.5, h),
        b2=float(rng.uniform(-0.5, 0.5)),
    )
    watch = _DivergenceWatch(trace)
    for _ in range(config.epochs):
        watch.step(mlp_objective(model, X, y))
        dw1, db1, dw2, db2 = mlp_gradient(model, X, y)
        lr = config.learning_rate
        model = MLPModel(
            w1=model.w1 - lr * dw1,
            b1=model.b1 - lr * db1,
            w2=model.w2 - lr * dw2,
            b2=model.b2 - lr * db2,
        )
    return model


def mlp_probability(model: MLPModel, vector) -> float:
    _, z = _mlp_forward(model, np.atleast_2d(np.asarray(vector, dtype=float)))
    return float(sigmoid(z)[0])


def predict_mlp(model: MLPModel, vector) -> int:
    return 1 if mlp_probability(model, vector) > 0.5 else -1


def predict_mlp_matrix(model: MLPModel, vectors) -> np.ndarray:
    _, z = _mlp_forward(model, np.atleast_2d(np.asarray(vectors, dtype=float)))
    return np.where(sigmoid(z) > 0.5, 1, -1)


# --- multi-instance logistic regression -----------------------------------

MILR_COMBINES = ("noisy-or", "arithmetic-mean")


def _instance_probs(weights, bias, bag_X):
    return np.clip(sigmoid(bag_X @ weights + bias), _P_CLIP, 1.0 - _P_CLIP)


def _bag_positive_prob(p: np.ndarray, combine: str) -> float:
    if combine == "noisy-or":
        return float(-np.expm1(np.log1p(-p).sum()))
    if combine == "arithmetic-mean":
        return float(p.mean())
    raise InvalidConfig(f"combine {combine!r} not one of {MILR_COMBINES}")


def milr_objective(weights, bias, bags, labels, l2: float, combine: str = "noisy-or") -> float:
    """Mean bag negative log-likelihood plus the L2 penalty."""
    total = 0.0
    for bag_X, label in zip(bags, labels):
        P = _bag_positive_prob(_instance_probs(weights, bias, bag_X), combine)
        P = min(max(P, _P_CLIP), 1.0 - _P_CLIP)
        total += -math.log(P) if label == 1 else -math.log1p(-P)
    return total / len(bags) + 0.5 * l2 * float(weights @ weights)


def milr_gradient(weights, bias, bags, labels, l2: float, combine: str = "noisy-or"):
    grad_w = l2 * weights.copy()
    grad_b = 0.0
    n = len(bags)
    for bag_X, label in zip(bags, labels):
        p = _instance_probs(weights, bias, bag_X)
        P = _bag_positive_prob(p, combine)
        P = min(max(P, _P_CLIP), 1.0 - _P_CLIP)
        if combine == "noisy-or":
            # dP/dp_i = (1-P)/(1-p_i); dp_i/dz_i = p_i (1-p_i)
            if label == 1:
                dz = -p * (1.0 - P) / P
            else:
                dz = p.copy()
        else:
            dP_dz = p * (1.0 - p) / p.size
            dz = (-dP_dz / P) if label == 1 else (dP_dz / (1.0 - P))
        dz = dz / n
        grad_w += bag_X.T @ dz
        grad_b += float(dz.sum())
    return grad_w, grad_b


def _milr_fast_step(w, b, stacked, positive, l2: float, combine: str):
    """Objective and gradient in one pass over same-sized bags stacked
    into a (bags, instances, features) array.  Same math as the per-bag
    functions, vectorized."""
    n_bags, n_inst, _ = stacked.shape
    p = np.clip(sigmoid(stacked @ w + b), _P_CLIP, 1.0 - _P_CLIP)
    if combine == "noisy-or":
        P = -np.expm1(np.log1p(-p).sum(axis=1))
    else:
        P = p.mean(axis=1)
    P = np.clip(P, _P_CLIP, 1.0 - _P_CLIP)
    nll = np.where(positive, -np.log(P), -np.log1p(-P))
    objective = float(nll.mean()) + 0.5 * l2 * float(w @ w)
    if combine == "noisy-or":
        dz = np.where(positive[:, None], -p * ((1.0 - P) / P)[:, None], p)
    else:
        dP_dz = p * (1.0 - p) / n_inst
        dz = np.where(positive[:, None], -dP_dz / P[:, None], dP_dz / (1.0 - P)[:, None])
    dz = dz / n_bags
    grad_w = np.einsum("bif,bi->f", stacked, dz) + l2 * w
    grad_b = float(dz.sum())
    return objective, grad_w, grad_b


def train_milr(bags, labels, config: TrainConfig | None = None, trace=None,
               combine: str = "noisy-or") -> LinearModel:
    """Gradient descent on bag likelihoods; the gradient flows through the
    instance-probability combination (noisy-OR by default)."""
    bag_list = [np.atleast_2d(np.asarray(b, dtype=float)) for b in bags]
    y = np.asarray(labels)
    if not bag_list or y.size != len(bag_list):
        raise InvalidConfig(f"{len(bag_list)} bags and {y.size} labels are inconsistent")
    _check_classes(y)
    if combine not in MILR_COMBINES:
        raise InvalidConfig(f"combine {combine!r} not one of {MILR_COMBINES}")
    config = config or TrainConfig()
    w = np.zeros(bag_list[0].shape[1])
    b = 0.0
    watch = _DivergenceWatch(trace)
    shape = bag_list[0].shape
    stacked = np.stack(bag_list) if all(bag.shape == shape for bag in bag_list) else None
    for _ in range(config.epochs):
        if stacked is not None:
            objective, grad_w, grad_b = _milr_fast_step(
                w, b, stacked, y == 1, config.l2, combine
            )
        else:
            objective = milr_objective(w, b, bag_list, y, config.l2, combine)
            grad_w, grad_b = milr_gradient(w, b, bag_list, y, config.l2, combine)
        watch.step(objective)
        w = w - config.learning_rate * grad_w
        b = b - config.learning_rate * grad_b
    return LinearModel(weights=w, bias=b)


def bag_probability(model: LinearModel, bag, combine: str = "noisy-or") -> float:
    bag_X = np.atleast_2d(np.asarray(bag, dtype=float))
    return _bag_positive_prob(_instance_probs(model.weights, model.bias, bag_X), combine)


def predict_bag(model: LinearModel, bag, combine: str = "noisy-or") -> int:
    return 1 if bag_probability(model, bag, combine) > 0.5 else -1


# --- serialization --------------------------------------------------------

MODEL_FORMAT = "sarcaze-model/1"


def model_to_dict(model) -> dict:
    if isinstance(model, LinearModel):
        params = {"weights": model.weights.tolist(), "bias": model.bias}
        kind = "linear"
    elif isinstance(model, GNBModel):
        params = {
            "priors": {str(c): model.priors[c] for c in (1, -1)},
            "means": {str(c): model.means[c].tolist() for c in (1, -1)},
            "variances": {str(c): model.variances[c].tolist() for c in (1, -1)},
        }
        kind = "gnb"
    elif isinstance(model, MLPModel):
        params = {
            "w1": model.w1.tolist(),
            "b1": model.b1.tolist(),
            "w2": model.w2.tolist(),
            "b2": model.b2,
        }
        kind = "mlp"
    else:
        raise InvalidConfig(f"cannot serialize {type(model).__name__}")
    return {"format": MODEL_FORMAT, "kind": kind, "params": params}


def model_from_dict(data: dict):
    if data.get("format") != MODEL_FORMAT:
        raise InvalidConfig(f"unsupported model format {data.get('format')!r}")
    kind = data.get("kind")
    params = data.get("params", {})
    if kind == "linear":
        return LinearModel(weights=np.asarray(params["weights"], dtype=float),
                           bias=float(params["bias"]))
    if kind == "gnb":
        return GNBModel(
            priors={c: float(params["priors"][str(c)]) for c in (1, -1)},
            means={c: np.asarray(params["means"][str(c)], dtype=float) for c in (1, -1)},
            variances={c: np.asarray(params["variances"][str(c)], dtype=float) for c in (1, -1)},
        )
    if kind == "mlp":
        return MLPModel(
            w1=np.asarray(params["w1"], dtype=float),
            b1=np.asarray(params["b1"], dtype=float),
            w2=np.asarray(params["w2"], dtype=float),
            b2=float(params["b2"]),
        )
    raise InvalidConfig(f"unknown model kind {kind!r}")
