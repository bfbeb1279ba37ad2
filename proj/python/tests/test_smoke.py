import numpy as np
import pytest

import upbwit


def test_enumerate_counts():
    assert [len(upbwit.enumerate_layouts(d, d)) for d in (3, 4, 5, 6)] == [1, 9, 36, 100]
    with pytest.raises(ValueError):
        upbwit.enumerate_layouts(2, 2)


def test_state_is_ppt_rank_four():
    s = upbwit.build_state("3x3-2.2-2.2")
    rho = s["rho"]
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.linalg.matrix_rank(rho, tol=1e-8) == 4
    assert np.linalg.eigvalsh(upbwit.partial_transpose(rho, 3, 3)).min() > -1e-10


def test_gilbert_fit_and_witnesses():
    rho = upbwit.build_state("3x3-2.2-2.2")["rho"]
    run = upbwit.run_gilbert(rho, 3, 3, corrections=1000, seed=3, real_only=True, log_every=20)
    d2 = run["squared_distances"]
    assert all(b <= a + 1e-14 for a, b in zip(d2, d2[1:]))
    assert run["distance"] == pytest.approx(upbwit.hs_distance(rho, run["rho1"]))

    fit = upbwit.fit_decay(run["corrections"], d2)
    assert 0 < fit["a"] <= min(d2)
    assert fit["classification"] == "entangled"

    g = upbwit.gilbert_witness(rho, run["rho1"], 3, 3, restarts=200, seed=1)
    b = upbwit.bgr_witness("3x3-2.2-2.2", restarts=200, seed=1)
    assert g["valid"] and b["valid"]
    assert g["hyperplane_distance"] > b["hyperplane_distance"]
    assert np.real(np.trace(g["w"] @ rho)) < 0


def test_bad_input_raises():
    with pytest.raises(ValueError):
        upbwit.build_state("3x3-1.1-2.2")
    with pytest.raises(ValueError):
        upbwit.hs_distance(np.eye(3), np.eye(4))
