import math

import numpy as np
import pytest

import c1free


def test_mesh_generators():
    sq = c1free.unit_square(3, "clamped")
    assert sq.dim == 2
    assert sq.num_cells == 18
    assert sq.vertices.shape == (2, 16)
    assert math.isclose(sq.total_volume(), 1.0)
    assert sq.validate() == ""
    cube = c1free.freudenthal(1)
    assert cube.num_cells == 6
    assert c1free.worsey_farin_split(cube).num_cells == 72
    assert c1free.alfeld_split(sq).num_cells == 54


def test_mesh_file_round_trip(tmp_path):
    mesh = c1free.perturb(c1free.unit_square(4), 0.3, seed=3)
    path = str(tmp_path / "sq.mesh")
    c1free.write_mesh(mesh, path)
    back = c1free.read_mesh(path)
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.cells, mesh.cells)


def test_bad_input_raises(tmp_path):
    with pytest.raises(ValueError):
        c1free.unit_square(2, "glued")
    with pytest.raises(RuntimeError):
        c1free.read_mesh(str(tmp_path / "missing.mesh"))


def test_plate_static_is_c1():
    r = c1free.plate_static(c1free.unit_square(4), 5, tol=1e-10)
    assert r["converged"]
    assert r["iterations"] <= 8
    assert r["c1_jump"] < 1e-6
    assert r["gradient_mismatch"] < 1e-9
    assert r["residuals"][-1] < 1e-10


def test_projection_3d():
    r = c1free.projection_3d(1, 8)
    assert r["converged"]
    assert r["iterations"] == 2
    assert r["error_rel_h2"] < 1e-2


def test_general_fourth_order_callback():
    mesh = c1free.unit_square(2, "clamped")
    r = c1free.general_fourth_order(mesh, 5, np.array([1.0, 0.0]), lambda x: 1.0)
    assert r["converged"]
    zero = c1free.general_fourth_order(mesh, 5, np.array([1.0, 0.0]), lambda x: 0.0)
    assert np.linalg.norm(zero["w"]) == 0.0


def test_kernel_dimension_oracles_agree():
    assert c1free.kernel_dimension(c1free.unit_square(1, "free"), 4) == (21, 21)


def test_utilities():
    assert c1free.convergence_slope([0.5, 0.25], [0.25, 0.0625]) == pytest.approx(2.0)
    assert c1free.energy_deviation([1.0, 1.01]) == pytest.approx(0.01)
