import numpy as np
import pytest

from subgan import autodiff as ad
from subgan.autodiff import (ComputationRecord, RecordConsumedError,
                             ShapeMismatchError, Tensor)
from subgan.models import Mlp, ToyGenerator

from oracles import central_diff_grad, grad_close, mlp_forward


def test_identity_affine_layer():
    x = Tensor([[1.0, 2.0, 3.0]])
    w = Tensor(np.eye(3), requires_grad=True)
    b = Tensor(np.zeros(3), requires_grad=True)
    out = ad.affine(x, w, b)
    np.testing.assert_array_equal(out.data, [[1.0, 2.0, 3.0]])


def test_sigmoid_at_zero():
    out = ad.sigmoid(Tensor([[0.0]]))
    assert out.data[0, 0] == 0.5


def test_square_gradient():
    x = Tensor(np.array(3.0).reshape(1, 1), requires_grad=True)
    y = ad.sumsq(x)
    ad.backprop(y)
    assert x.grad[0, 0] == 6.0


def test_bce_logit_gradient_at_zero():
    # gradient of BCE(sigma(v), label 1) in v is sigma(0) - 1 = -0.5
    v = Tensor([[0.0]], requires_grad=True)
    loss = ad.mean_all(ad.bce_from_logits(v, np.ones((1, 1))))
    ad.backprop(loss)
    assert v.grad[0, 0] == pytest.approx(-0.5, abs=1e-15)


def test_mlp_forward_matches_matrix_oracle():
    rng = np.random.default_rng(11)
    model = Mlp([4, 6, 3], activation="tanh", rng=rng)
    z = rng.standard_normal((5, 4))
    expected = mlp_forward(z, [w.data for w in model.weights],
                           [b.data for b in model.biases], "tanh")
    out = model(Tensor(z))
    np.testing.assert_allclose(out.data, expected, rtol=0, atol=0)


def test_forward_captures_record_and_rejects_bad_shape():
    rng = np.random.default_rng(3)
    model = Mlp([3, 4, 2], activation="sigmoid", rng=rng)
    out, record = ad.forward(model, Tensor(rng.standard_normal((2, 3))))
    assert record.output is out
    assert len(record) > 4
    with pytest.raises(ShapeMismatchError, match="affine0"):
        model(Tensor(rng.standard_normal((2, 5))))


@pytest.mark.parametrize("seed", range(10))
def test_mlp_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    model = Mlp([3, 5, 4, 2], activation="tanh", rng=rng)
    z = rng.standard_normal((4, 3))

    def loss_value():
        out = model(Tensor(z))
        return ad.mean_all(ad.sumsq(out))

    model.zero_grad()
    ad.backprop(loss_value())
    for p in model.parameters():
        def fn(arr, p=p):
            saved = p.data
            p.data = arr
            val = loss_value().item()
            p.data = saved
            return val

        fd = central_diff_grad(fn, p.data.copy())
        assert grad_close(p.grad, fd)


PRIMITIVE_CASES = [
    ("add", lambda a, b: ad.add(a, b), 2),
    ("sub", lambda a, b: ad.sub(a, b), 2),
    ("mul", lambda a, b: ad.mul(a, b), 2),
    ("scale", lambda a: ad.scale(a, 1.7), 1),
    ("sigmoid", lambda a: ad.sigmoid(a), 1),
    ("tanh", lambda a: ad.tanh(a), 1),
    ("relu", lambda a: ad.relu(a), 1),
    ("log", lambda a: ad.log(a), 1),
    ("sumsq", lambda a: ad.sumsq(a), 1),
    ("abs_sum", lambda a: ad.abs_sum(a), 1),
    ("sum", lambda a: ad.sum_all(a), 1),
    ("mean", lambda a: ad.mean_all(a), 1),
    ("augment", lambda a: ad.augment_ones(a), 1),
]


@pytest.mark.parametrize("name,op,arity", PRIMITIVE_CASES)
@pytest.mark.parametrize("seed", range(3))
def test_primitive_gradients_match_finite_differences(name, op, arity, seed):
    rng = np.random.default_rng(100 + seed)
    # keep values away from relu/abs kinks and log's domain edge
    base = rng.uniform(0.5, 2.0, size=(3, 4))
    args = [Tensor(base * rng.uniform(0.8, 1.2, size=base.shape), requires_grad=True)
            for _ in range(arity)]
    seed_grad = rng.standard_normal(op(*args).shape)

    def scalar(*tensors):
        out = op(*tensors)
        return float(np.sum(out.data * seed_grad))

    out = op(*args)
    ad.backward(ComputationRecord(out), seed_grad)
    for i, arg in enumerate(args):
        def fn(arr, i=i):
            subst = [Tensor(a.data) for a in args]
            subst[i] = Tensor(arr)
            return scalar(*subst)

        fd = central_diff_grad(fn, arg.data.copy())
        assert grad_close(arg.grad, fd), f"{name} argument {i}"


def test_affine_gradients_match_finite_differences():
    rng = np.random.default_rng(42)
    x = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
    w = Tensor(rng.standard_normal((2, 4)), requires_grad=True)
    b = Tensor(rng.standard_normal(2), requires_grad=True)
    seed_grad = rng.standard_normal((3, 2))

    def scalar(xd, wd, bd):
        return float(np.sum((xd @ wd.T + bd) * seed_grad))

    out = ad.affine(x, w, b)
    ad.backward(ComputationRecord(out), seed_grad)
    for arg, pick in ((x, 0), (w, 1), (b, 2)):
        def fn(arr, pick=pick):
            parts = [x.data, w.data, b.data]
            parts[pick] = arr
            return scalar(*parts)

        fd = central_diff_grad(fn, arg.data.copy())
        assert grad_close(arg.grad, fd)


def test_bce_from_logits_gradient_matches_finite_differences():
    rng = np.random.default_rng(9)
    labels = rng.integers(0, 2, size=(6, 1)).astype(np.float64)
    v = Tensor(rng.standard_normal((6, 1)) * 3, requires_grad=True)
    loss = ad.mean_all(ad.bce_from_logits(v, labels))
    ad.backprop(loss)

    def fn(arr):
        s = 1.0 / (1.0 + np.exp(-arr))
        return float(np.mean(-labels * np.log(s) - (1 - labels) * np.log(1 - s)))

    fd = central_diff_grad(fn, v.data.copy())
    assert grad_close(v.grad, fd)


def test_backward_is_linear_in_the_seed():
    rng = np.random.default_rng(5)
    model = Mlp([3, 4, 2], activation="tanh", rng=rng)
    z = Tensor(rng.standard_normal((3, 3)))
    s1 = rng.standard_normal((3, 2))
    s2 = rng.standard_normal((3, 2))
    a, b = 1.3, -0.7

    def grads_for(seed):
        model.zero_grad()
        out, record = ad.forward(model, z)
        ad.backward(record, seed)
        return [p.grad.copy() for p in model.parameters()]

    combined = grads_for(a * s1 + b * s2)
    g1 = grads_for(s1)
    g2 = grads_for(s2)
    for gc, ga, gb in zip(combined, g1, g2):
        np.testing.assert_allclose(gc, a * ga + b * gb, atol=1e-12, rtol=0)


def test_gradient_accumulation_is_additive():
    x = Tensor([[2.0]], requires_grad=True)
    out = ad.sumsq(x)
    record = ComputationRecord(out)
    ad.backward(record, np.asarray(1.0))
    once = x.grad.copy()
    ad.backward(record, np.asarray(1.0))
    np.testing.assert_array_equal(x.grad, 2.0 * once)


def test_single_use_record_rejects_second_pass():
    x = Tensor([[2.0]], requires_grad=True)
    record = ComputationRecord(ad.sumsq(x), single_use=True)
    ad.backward(record, np.asarray(1.0))
    with pytest.raises(RecordConsumedError):
        ad.backward(record, np.asarray(1.0))


def test_backward_rejects_mismatched_seed():
    x = Tensor([[2.0, 1.0]], requires_grad=True)
    record = ComputationRecord(ad.sigmoid(x))
    with pytest.raises(ShapeMismatchError):
        ad.backward(record, np.ones((3, 3)))


def test_determinism_bit_identical():
    def build_and_grad():
        rng = np.random.default_rng(77)
        model = Mlp([4, 8, 3], activation="sigmoid", rng=rng)
        z = Tensor(rng.standard_normal((6, 4)))
        model.zero_grad()
        out = model(z)
        ad.backprop(ad.mean_all(ad.sumsq(out)))
        return out.data.copy(), [p.grad.copy() for p in model.parameters()]

    out1, grads1 = build_and_grad()
    out2, grads2 = build_and_grad()
    np.testing.assert_array_equal(out1, out2)
    for a, b in zip(grads1, grads2):
        np.testing.assert_array_equal(a, b)


def test_toy_generator_jacobian_closed_form():
    # d(x_i)/d(B_jk) = z_aug[k] when i == j, else 0
    rng = np.random.default_rng(1)
    gen = ToyGenerator(2, rng=rng)
    z = rng.standard_normal(3).reshape(1, 3)
    with pytest.raises(ShapeMismatchError):
        gen(Tensor(z))
    z = rng.standard_normal((1, 2))
    jac = ad.jacobian(gen, Tensor(z), wrt="parameters")
    z_aug = np.concatenate([z.ravel(), [1.0]])
    expected = np.zeros((2, 2 * 3))
    for i in range(2):
        for k in range(3):
            expected[i, i * 3 + k] = z_aug[k]
    np.testing.assert_array_equal(jac.data, expected)


def test_linear_functional_jacobian_is_the_coefficient_row():
    c = np.array([[1.5, -2.0, 0.25]])

    class Linear:
        def __call__(self, x):
            return ad.affine(x, Tensor(c, requires_grad=True))

        def parameters(self):
            return []

    x = Tensor(np.random.default_rng(0).standard_normal((1, 3)))
    jac = ad.jacobian(Linear(), x, wrt="input")
    np.testing.assert_array_equal(jac.data, c)


@pytest.mark.parametrize("wrt", ["parameters", "input"])
def test_mlp_jacobian_matches_finite_difference_columns(wrt):
    rng = np.random.default_rng(8)
    model = Mlp([3, 5, 2], activation="tanh", rng=rng)
    z = rng.standard_normal((1, 3))
    jac = ad.jacobian(model, Tensor(z), wrt=wrt).data

    h = 1e-6
    if wrt == "input":
        cols = z.size
        fd = np.zeros((2, cols))
        for j in range(cols):
            up, down = z.copy(), z.copy()
            up.flat[j] += h
            down.flat[j] -= h
            fd[:, j] = (model(Tensor(up)).data - model(Tensor(down)).data).ravel() / (2 * h)
    else:
        flat = model.flat_parameters()
        cols = flat.size
        fd = np.zeros((2, cols))
        for j in range(cols):
            for sign, store in ((+1, 0), (-1, 1)):
                bumped = flat.copy()
                bumped[j] += sign * h
                model.set_flat_parameters(bumped)
                if sign == +1:
                    up_val = model(Tensor(z)).data.copy()
                else:
                    down_val = model(Tensor(z)).data.copy()
            model.set_flat_parameters(flat)
            fd[:, j] = (up_val - down_val).ravel() / (2 * h)
    assert grad_close(jac, fd)


def test_jacobian_restores_preexisting_gradients():
    rng = np.random.default_rng(4)
    model = Mlp([2, 3, 2], activation="tanh", rng=rng)
    z = Tensor(rng.standard_normal((1, 2)))
    ad.backprop(ad.sumsq(model(z)))
    before = [p.grad.copy() for p in model.parameters()]
    ad.jacobian(model, z, wrt="parameters")
    for p, saved in zip(model.parameters(), before):
        np.testing.assert_array_equal(p.grad, saved)
