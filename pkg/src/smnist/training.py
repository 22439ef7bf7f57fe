"""From-scratch classifiers: softmax regression and a one-hidden-layer MLP.

Both are trained by minibatch SGD on cross-entropy, deterministic per seed.
No framework: forward, backward, and the update rule are spelled out so the
gradients can be checked against finite differences.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import idx
from .canvas import PixelGrid

SOFTMAX = "softmax"
MLP = "mlp"
NUM_CLASSES = 10


class TrainingDiverged(RuntimeError):
    """Loss became non-finite during training."""


@dataclass
class TrainConfig:
    kind: str = SOFTMAX
    learning_rate: float = 0.5
    batch_size: int = 100
    steps: int | None = 1000    # total minibatch updates (i.i.d. batches)
    epochs: int | None = None   # or shuffled full passes
    hidden: int = 128
    seed: int = 0
    scale_pixels: bool = True   # map bytes to [0, 1] before training

    def __post_init__(self):
        if self.kind not in (SOFTMAX, MLP):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.hidden <= 0:
            raise ValueError("hyperparameters must be positive")
        if (self.steps is None) == (self.epochs is None):
            raise ValueError("set exactly one of steps/epochs")


def softmax_config(**kw) -> TrainConfig:
    return TrainConfig(kind=SOFTMAX, **kw)


def mlp_config(**kw) -> TrainConfig:
    kw.setdefault("learning_rate", 0.1)
    kw.setdefault("epochs", 10)
    kw.setdefault("steps", None)
    return TrainConfig(kind=MLP, **kw)


@dataclass
class ModelParams:
    kind: str
    rows: int
    cols: int
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray | None = None
    b2: np.ndarray | None = None

    @property
    def tensors(self) -> dict:
        out = {"w1": self.w1, "b1": self.b1}
        if self.kind == MLP:
            out["w2"] = self.w2
            out["b2"] = self.b2
        return out


@dataclass
class Metrics:
    accuracy: float
    confusion: np.ndarray   # confusion[true, predicted]
    loss: float | None = None


def init_params(kind: str, rows: int, cols: int, hidden: int,
                rng: np.random.Generator) -> ModelParams:
    """Zeros for softmax; symmetric uniform +-1/sqrt(fan_in) for the MLP."""
    dim = rows * cols
    if kind == SOFTMAX:
        return ModelParams(kind, rows, cols,
                           w1=np.zeros((dim, NUM_CLASSES)),
                           b1=np.zeros(NUM_CLASSES))
    lim1 = 1.0 / np.sqrt(dim)
    lim2 = 1.0 / np.sqrt(hidden)
    return ModelParams(kind, rows, cols,
                       w1=rng.uniform(-lim1, lim1, size=(dim, hidden)),
                       b1=np.zeros(hidden),
                       w2=rng.uniform(-lim2, lim2, size=(hidden, NUM_CLASSES)),
                       b2=np.zeros(NUM_CLASSES))


def _log_softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def _logits(params: ModelParams, x):
    if params.kind == SOFTMAX:
        return x @ params.w1 + params.b1, None
    pre = x @ params.w1 + params.b1
    h = np.maximum(pre, 0.0)
    return h @ params.w2 + params.b2, (pre, h)


def loss_and_gradient(params: ModelParams, x, y):
    """Mean cross-entropy over the batch and gradients for every tensor."""
    if len(x) == 0:
        raise ValueError("empty batch")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    logits, hidden = _logits(params, x)
    logp = _log_softmax(logits)
    n = len(x)
    loss = -logp[np.arange(n), y].mean()

    g = np.exp(logp)
    g[np.arange(n), y] -= 1.0
    g /= n
    if params.kind == SOFTMAX:
        return loss, {"w1": x.T @ g, "b1": g.sum(axis=0)}
    pre, h = hidden
    gw2 = h.T @ g
    gb2 = g.sum(axis=0)
    gh = g @ params.w2.T
    gh[pre <= 0.0] = 0.0
    return loss, {"w1": x.T @ gh, "b1": gh.sum(axis=0), "w2": gw2, "b2": gb2}


def train(train_xy, test_xy, config: TrainConfig):
    """SGD on (x, y) arrays; returns (params, Metrics, per-epoch mean losses)."""
    x, y = train_xy
    n, dim = x.shape
    rows = cols = int(round(dim ** 0.5))
    if rows * cols != dim:
        rows, cols = 1, dim
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 77)))
    params = init_params(config.kind, rows, cols, config.hidden, rng)

    x = np.asarray(x, dtype=np.float64)
    if config.scale_pixels:
        x = x / 255.0
    y = np.asarray(y, dtype=np.int64)

    epoch_losses = []
    if config.steps is not None:
        batches_per_epoch = max(1, n // config.batch_size)
        acc, seen = 0.0, 0
        for step in range(config.steps):
            batch = rng.choice(n, size=min(config.batch_size, n), replace=False)
            loss = _sgd_step(params, x[batch], y[batch], config.learning_rate, step)
            acc += loss
            seen += 1
            if seen == batches_per_epoch or step == config.steps - 1:
                epoch_losses.append(acc / seen)
                acc, seen = 0.0, 0
    else:
        for epoch in range(config.epochs):
            order = rng.permutation(n)
            losses = []
            for start in range(0, n - config.batch_size + 1, config.batch_size):
                batch = order[start:start + config.batch_size]
                losses.append(_sgd_step(
                    params, x[batch], y[batch], config.learning_rate, epoch))
            epoch_losses.append(float(np.mean(losses)) if losses else float("nan"))

    metrics = None
    if test_xy is not None:
        xt, yt = test_xy
        xt = np.asarray(xt, dtype=np.float64)
        if config.scale_pixels:
            xt = xt / 255.0
        metrics = evaluate(params, xt, yt, scaled=True)
    return params, metrics, epoch_losses


def _sgd_step(params, xb, yb, lr, where):
    loss, grads = loss_and_gradient(params, xb, yb)
    if not np.isfinite(loss):
        raise TrainingDiverged(f"non-finite loss at {where}")
    for name, g in grads.items():
        tensor = getattr(params, name)
        tensor -= lr * g
    return loss


def predict(params: ModelParams, x) -> np.ndarray:
    logits, _ = _logits(params, np.asarray(x, dtype=np.float64))
    return logits.argmax(axis=1)


def evaluate(params: ModelParams, x, y, scaled: bool = False) -> Metrics:
    """Argmax predictions against labels; accuracy is trace/total."""
    x = np.asarray(x, dtype=np.float64)
    if not scaled:
        x = x / 255.0
    y = np.asarray(y, dtype=np.int64)
    pred = predict(params, x)
    confusion = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    np.add.at(confusion, (y, pred), 1)
    accuracy = float(np.trace(confusion)) / max(1, confusion.sum())
    logits, _ = _logits(params, x)
    logp = _log_softmax(logits)
    loss = float(-logp[np.arange(len(y)), y].mean()) if len(y) else None
    return Metrics(accuracy=accuracy, confusion=confusion, loss=loss)


def export_weight_images(params: ModelParams) -> list:
    """One grayscale image per class: zero weight maps to mid-gray 128,
    +-max|w| to 255/0.  Softmax models only."""
    if params.kind != SOFTMAX:
        raise ValueError("weight images are defined for softmax models only")
    out = []
    for c in range(params.w1.shape[1]):
        v = params.w1[:, c]
        peak = np.abs(v).max()
        if peak == 0.0:
            pixels = np.full(v.shape, 128, dtype=np.uint8)
        else:
            pixels = np.rint(127.5 * (1.0 + v / peak)).astype(np.uint8)
        out.append(PixelGrid(params.cols, params.rows, pixels.tobytes()))
    return out


# ---------------------------------------------------------------------------
# checkpoints: text header, then big-endian float64 tensors in fixed order


def save_model(params: ModelParams, path):
    dims = [params.rows, params.cols, params.w1.shape[0], params.w1.shape[1]]
    if params.kind == MLP:
        dims.append(params.w2.shape[1])
    header = f"{params.kind} {' '.join(map(str, dims))}\n".encode()
    blob = b"".join(
        np.ascontiguousarray(t, dtype=">f8").tobytes() for t in params.tensors.values()
    )
    Path(path).write_bytes(header + blob)


def load_model(path) -> ModelParams:
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    fields = raw[:nl].decode().split()
    kind, dims = fields[0], [int(v) for v in fields[1:]]
    rows, cols, d_in, d1 = dims[:4]
    body = raw[nl + 1:]

    def take(shape):
        nonlocal body
        n = int(np.prod(shape)) * 8
        arr = np.frombuffer(body[:n], dtype=">f8").astype(np.float64).reshape(shape)
        body = body[n:]
        return arr

    if kind == SOFTMAX:
        return ModelParams(kind, rows, cols, w1=take((d_in, d1)), b1=take((d1,)))
    d_out = dims[4]
    return ModelParams(kind, rows, cols,
                       w1=take((d_in, d1)), b1=take((d1,)),
                       w2=take((d1, d_out)), b2=take((d_out,)))


# ---------------------------------------------------------------------------
# IDX directory loading


def load_arrays(dataset_dir):
    """(x_train, y_train, x_test, y_test, (rows, cols)) from a dataset dir."""
    dataset_dir = Path(dataset_dir)

    def find(name):
        for cand in (dataset_dir / name, dataset_dir / (name + ".gz")):
            if cand.exists():
                return cand
        raise FileNotFoundError(f"{name}[.gz] not found in {dataset_dir}")

    tr_i = idx.load_images(find(idx.TRAIN_IMAGES_NAME))
    tr_l = idx.load_labels(find(idx.TRAIN_LABELS_NAME))
    te_i = idx.load_images(find(idx.TEST_IMAGES_NAME))
    te_l = idx.load_labels(find(idx.TEST_LABELS_NAME))
    if tr_i.count != tr_l.count or te_i.count != te_l.count:
        raise ValueError(f"image/label counts differ in {dataset_dir}")

    def arrays(images, labels):
        x = np.frombuffer(images.pixels, dtype=np.uint8).reshape(
            images.count, images.rows * images.cols)
        y = np.frombuffer(labels.labels, dtype=np.uint8).astype(np.int64)
        return x, y

    xtr, ytr = arrays(tr_i, tr_l)
    xte, yte = arrays(te_i, te_l)
    return xtr, ytr, xte, yte, (tr_i.rows, tr_i.cols)
