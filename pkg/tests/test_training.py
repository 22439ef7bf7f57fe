import math

import numpy as np
import pytest

from smnist import training
from smnist.training import (
    TrainingDiverged,
    evaluate,
    export_weight_images,
    init_params,
    load_arrays,
    load_model,
    loss_and_gradient,
    mlp_config,
    predict,
    save_model,
    softmax_config,
    train,
)


def _random_params(kind, rng, rows=4, cols=4, hidden=8):
    params = init_params(kind, rows, cols, hidden, rng)
    params.w1 = rng.normal(0, 0.2, params.w1.shape)
    params.b1 = rng.normal(0, 0.2, params.b1.shape)
    if kind == training.MLP:
        params.w2 = rng.normal(0, 0.2, params.w2.shape)
        params.b2 = rng.normal(0, 0.2, params.b2.shape)
    return params


def test_zero_init_softmax_loss_is_ln10():
    rng = np.random.default_rng(0)
    params = init_params(training.SOFTMAX, 4, 4, 8, rng)
    x = rng.random((7, 16))
    y = rng.integers(0, 10, size=7)
    loss, _ = loss_and_gradient(params, x, y)
    assert abs(loss - math.log(10)) < 1e-9


def _finite_difference_check(kind, seed):
    rng = np.random.default_rng(seed)
    params = _random_params(kind, rng)
    x = rng.random((5, 16))
    y = rng.integers(0, 10, size=5)
    _, grads = loss_and_gradient(params, x, y)
    eps = 1e-4
    worst = 0.0
    for name, g in grads.items():
        tensor = getattr(params, name)
        it = np.nditer(tensor, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            orig = tensor[i]
            tensor[i] = orig + eps
            lp, _ = loss_and_gradient(params, x, y)
            tensor[i] = orig - eps
            lm, _ = loss_and_gradient(params, x, y)
            tensor[i] = orig
            fd = (lp - lm) / (2 * eps)
            denom = max(abs(fd), abs(g[i]), 1e-8)
            worst = max(worst, abs(fd - g[i]) / denom)
    return worst


@pytest.mark.parametrize("kind", [training.SOFTMAX, training.MLP])
def test_gradients_match_central_differences(kind):
    assert _finite_difference_check(kind, seed=12) < 1e-4


def test_duplicated_batch_leaves_loss_unchanged():
    rng = np.random.default_rng(4)
    params = _random_params(training.MLP, rng)
    x = rng.random((6, 16))
    y = rng.integers(0, 10, size=6)
    a, _ = loss_and_gradient(params, x, y)
    b, _ = loss_and_gradient(params, np.vstack([x, x]), np.concatenate([y, y]))
    assert abs(a - b) < 1e-12


def test_empty_batch_rejected():
    rng = np.random.default_rng(0)
    params = init_params(training.SOFTMAX, 4, 4, 8, rng)
    with pytest.raises(ValueError):
        loss_and_gradient(params, np.zeros((0, 16)), np.zeros(0, dtype=int))


def test_perfect_predictor_scores_one():
    rng = np.random.default_rng(5)
    params = _random_params(training.SOFTMAX, rng)
    x = rng.random((200, 16))
    y = predict(params, x)  # labels taken from the model itself
    m = evaluate(params, x * 255.0, y)
    assert m.accuracy == 1.0


def test_random_predictor_on_balanced_labels_scores_about_tenth():
    rng = np.random.default_rng(6)
    params = _random_params(training.SOFTMAX, rng)
    x = rng.random((10000, 16))
    y = rng.integers(0, 10, size=10000)  # labels independent of predictions
    m = evaluate(params, x * 255.0, y)
    assert abs(m.accuracy - 0.1) <= 0.01


def test_confusion_rows_sum_to_class_counts():
    rng = np.random.default_rng(7)
    params = _random_params(training.MLP, rng)
    x = rng.random((500, 16))
    y = rng.integers(0, 10, size=500)
    m = evaluate(params, x * 255.0, y)
    assert m.confusion.sum() == 500
    assert (m.confusion.sum(axis=1) == np.bincount(y, minlength=10)).all()
    assert m.accuracy == np.trace(m.confusion) / 500


@pytest.mark.filterwarnings("ignore:overflow encountered")
@pytest.mark.filterwarnings("ignore:invalid value")
def test_training_diverges_with_absurd_learning_rate():
    rng = np.random.default_rng(8)
    x = rng.random((50, 16)) * 255
    y = rng.integers(0, 10, size=50)
    with pytest.raises(TrainingDiverged):
        # huge steps blow the hidden activations up until the loss overflows
        train((x, y), None,
              mlp_config(learning_rate=1e300, epochs=2, batch_size=10))


def test_config_validation():
    with pytest.raises(ValueError):
        training.TrainConfig(kind="cnn")
    with pytest.raises(ValueError):
        training.TrainConfig(steps=None, epochs=None)
    with pytest.raises(ValueError):
        training.TrainConfig(steps=10, epochs=10)
    with pytest.raises(ValueError):
        training.TrainConfig(learning_rate=-1)


def test_train_learns_a_separable_toy_problem():
    rng = np.random.default_rng(9)
    # label = number of active blocks among 8 two-pixel blocks: linearly countable
    blocks = rng.integers(0, 2, size=(4000, 8))
    x = np.repeat(blocks, 2, axis=1) * 255.0
    y = blocks.sum(axis=1)
    params, metrics, losses = train(
        (x[:3000], y[:3000]), (x[3000:], y[3000:]),
        softmax_config(steps=5000, learning_rate=1.0, batch_size=50))
    assert metrics.accuracy > 0.9
    assert losses[-1] < losses[0]


def test_train_is_deterministic_per_seed():
    rng = np.random.default_rng(10)
    x = rng.random((300, 16)) * 255
    y = rng.integers(0, 10, size=300)
    a = train((x, y), (x, y), mlp_config(seed=5, epochs=2, batch_size=30))
    b = train((x, y), (x, y), mlp_config(seed=5, epochs=2, batch_size=30))
    c = train((x, y), (x, y), mlp_config(seed=6, epochs=2, batch_size=30))
    assert (a[0].w1 == b[0].w1).all() and a[1].accuracy == b[1].accuracy
    assert not (a[0].w1 == c[0].w1).all()


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    for kind in (training.SOFTMAX, training.MLP):
        params = _random_params(kind, rng)
        path = tmp_path / f"{kind}.model"
        save_model(params, path)
        loaded = load_model(path)
        assert loaded.kind == kind
        assert (loaded.rows, loaded.cols) == (params.rows, params.cols)
        for name, tensor in params.tensors.items():
            assert (getattr(loaded, name) == tensor).all()
        # header is human-readable text
        first_line = path.read_bytes().split(b"\n", 1)[0].decode()
        assert first_line.startswith(kind)


def test_weight_images_zero_model_is_mid_gray():
    rng = np.random.default_rng(0)
    params = init_params(training.SOFTMAX, 4, 4, 8, rng)
    images = export_weight_images(params)
    assert len(images) == 10
    for grid in images:
        assert (grid.width, grid.height) == (4, 4)
        assert set(grid.data) == {128}


def test_weight_images_reject_mlp():
    rng = np.random.default_rng(0)
    params = init_params(training.MLP, 4, 4, 8, rng)
    with pytest.raises(ValueError):
        export_weight_images(params)


def test_weight_images_match_training_shape(dataset_dir):
    x, y, xt, yt, shape = load_arrays(dataset_dir("m2-hard"))
    params, _, _ = train((x[:2000], y[:2000]), None, softmax_config(steps=50))
    images = export_weight_images(params)
    assert all((g.height, g.width) == shape for g in images)


def test_hard_1px_test_side_weights_stay_at_mid_gray(dataset_dir):
    import json

    outdir = dataset_dir("m1-hard-1px")
    x, y, xt, yt, _ = load_arrays(outdir)
    params, _, _ = train((x, y), None, softmax_config(steps=200))
    manifest = json.loads((outdir / "manifest.json").read_text())
    test_side = [tuple(p) for p in manifest["partition"]["test"]]
    assert len(test_side) == 59
    images = export_weight_images(params)
    for grid in images:
        values = {grid.pixel(r, c) for r, c in test_side}
        assert values == {128}  # never-updated weights sit at the zero level


def test_mlp_beats_softmax_on_naive(dataset_dir):
    x, y, xt, yt, _ = load_arrays(dataset_dir("m1-naive"))
    _, soft, _ = train((x, y), (xt, yt), softmax_config(seed=3))
    _, deep, losses = train((x, y), (xt, yt), mlp_config(seed=3))
    assert deep.accuracy >= soft.accuracy
    # per-epoch loss is non-increasing within tolerance
    assert all(b <= a + 1e-3 for a, b in zip(losses, losses[1:]))
