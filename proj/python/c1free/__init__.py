"""C1 finite elements on simplicial meshes through the iterated penalty method."""

from ._c1free import (
    Mesh,
    alfeld_split,
    convergence_slope,
    energy_deviation,
    freudenthal,
    general_fourth_order,
    kernel_dimension,
    perturb,
    plate_static,
    projection_3d,
    read_mesh,
    unit_square,
    worsey_farin_split,
    write_mesh,
)

__all__ = [
    "Mesh",
    "alfeld_split",
    "convergence_slope",
    "energy_deviation",
    "freudenthal",
    "general_fourth_order",
    "kernel_dimension",
    "perturb",
    "plate_static",
    "projection_3d",
    "read_mesh",
    "unit_square",
    "worsey_farin_split",
    "write_mesh",
]
