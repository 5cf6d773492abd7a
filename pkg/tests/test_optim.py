import math

import numpy as np
import pytest

from adkit.functions import QUAD_A, QUAD_B, quadratic, rosenbrock
from adkit.numdiff import DiffScheme, grad_numeric
from adkit.optim import (
    GDConfig,
    OptimizationError,
    gradient_descent,
    grad_reverse,
    mlp_init,
    mlp_loss,
    mlp_train,
    newton,
    value_and_grad,
)
from conftest import max_rel

square = lambda w: w[0] * w[0]  # noqa: E731


def test_config_validation():
    for bad in (dict(eta=0.0), dict(eta=-1.0), dict(max_iters=0), dict(mode="adjoint")):
        with pytest.raises(ValueError):
            GDConfig(**bad)


def test_gd_first_step_and_monotone_decrease():
    traj = gradient_descent(square, [1.0], GDConfig(eta=0.1, max_iters=30))
    assert traj[1].w == (0.8,)
    assert all(b.f < a.f for a, b in zip(traj, traj[1:]))
    assert traj[0].grad_norm == 2.0 and traj[0].iter == 0


def test_gd_stops_on_tolerance():
    traj = gradient_descent(square, [1.0], GDConfig(eta=0.1, max_iters=10_000, grad_tol=1e-6))
    assert traj[-1].grad_norm < 1e-6 and len(traj) < 10_000


def test_gd_rosenbrock_converges():
    traj = gradient_descent(rosenbrock, [-1.2, 1.0], GDConfig(eta=1e-3, max_iters=100_000))
    assert traj[-1].f < 1e-2


def test_gd_halving_rescues_oversized_step():
    plain = gradient_descent(square, [1.0], GDConfig(eta=1.5, max_iters=5))
    assert plain[-1].f > plain[0].f
    safe = gradient_descent(square, [1.0], GDConfig(eta=1.5, max_iters=5, halving=True))
    assert all(b.f <= a.f for a, b in zip(safe, safe[1:]))


def test_gd_aborts_on_non_finite():
    with pytest.raises(OptimizationError, match="non-finite"):
        gradient_descent(lambda w: w[0] * w[0] * w[0] * w[0], [10.0], GDConfig(eta=1e6, max_iters=20))


@pytest.mark.parametrize("f, w0", [(rosenbrock, [-1.2, 1.0]), (quadratic, [1.0, -1.0, 2.0])], ids=["rosenbrock", "quadratic"])
def test_modes_interchangeable_along_trajectory(f, w0):
    traj = gradient_descent(f, w0, GDConfig(eta=1e-3, max_iters=50))
    for st in traj:
        _, gr = value_and_grad(f, st.w, "reverse")
        _, gf = value_and_grad(f, st.w, "forward")
        _, gn = value_and_grad(f, st.w, "numeric")
        assert max_rel(gr, gf) <= 1e-6
        assert max_rel(gr, gn) <= 1e-6


def test_newton_exact_on_spd_quadratic():
    traj = newton(quadratic, [5.0, -3.0, 7.0], max_iters=1)
    want = np.linalg.solve(np.array(QUAD_A), np.array(QUAD_B))
    assert max(abs(a - b) for a, b in zip(traj[1].w, want)) < 1e-10


def test_newton_quartic_contracts_by_two_thirds():
    traj = newton(lambda w: w[0] ** 4, [1.0], max_iters=5, halving=False)
    for k, st in enumerate(traj):
        assert st.w[0] == pytest.approx((2 / 3) ** k, rel=1e-14)


def test_newton_rosenbrock():
    traj = newton(rosenbrock, [-1.2, 1.0], max_iters=50)
    assert traj[-1].f < 1e-10 and len(traj) <= 51


def test_newton_singular_hessian_reports_condition():
    with pytest.raises(OptimizationError, match="condition"):
        newton(lambda w: (w[0] + w[1]) * (w[0] + w[1]), [1.0, 2.0])


def test_mlp_init_is_seeded():
    assert mlp_init(7) == mlp_init(7) != mlp_init(8)
    assert len(mlp_init(7)) == 9 and all(-1 <= v <= 1 for v in mlp_init(3))


def test_mlp_gradient_check():
    p = mlp_init(7)
    _, g = grad_reverse(mlp_loss, p)
    fd = grad_numeric(mlp_loss, p, DiffScheme("center", 1e-5))
    assert max_rel(g, fd) <= 1e-5


def test_mlp_learns_xor():
    curve, p = mlp_train(seed=7, eta=0.5, epochs=5000)
    assert len(curve) == 5001 and curve[-1] < 0.05
    assert curve[-1] == pytest.approx(mlp_loss(p), rel=1e-15)


def test_mlp_zero_rate_and_small_step():
    curve, _ = mlp_train(seed=3, eta=0.0, epochs=5)
    assert len(set(curve)) == 1
    for seed in range(5):
        c, _ = mlp_train(seed=seed, eta=1e-3, epochs=1)
        assert c[1] <= c[0] and math.isfinite(c[1])
