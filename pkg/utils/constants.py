GRAVITY = (0.0, 0.0, -9.81)

DEFAULT_SOLVER_SETTINGS = {
    "h": 1.0 / 60.0,
    "max_iterations": 500,
    "eps_rel": 1e-4,
    "eps_abs": 1e-9,
    "eps_tr": 0.1,
    "aa_window": None,
    "heterogeneity_threshold": 10.0,
    "contact_margin": 1e-4,
    "contact_inner_iterations": 20,
    "contact_tolerance": 1e-10,
    "adjoint_max_iterations": 500,
    "adjoint_tolerance": 1e-10,
    "strict_convergence": False,
    "backward_projection": "adaptive",
    "reuse_factor": True,
}

GRADCHECK_SOLVER_SETTINGS = {
    "eps_rel": 1e-11,
    "eps_abs": 1e-14,
    "max_iterations": 3000,
    "contact_inner_iterations": 50,
    "contact_tolerance": 1e-13,
}

# Relative FD steps per design class, with absolute floors
FD_RELATIVE_STEP = {
    "q0": 1e-6,
    "v0": 1e-4,
    "f_ext": 1e-4,
    "w": 1e-4,
    "E": 1e-4,
}

FD_ABSOLUTE_FLOOR = {
    "q0": 1e-7,
    "v0": 1e-4,
    "f_ext": 1e-4,
    "w": 1e-6,
    "E": 1e-2,
}

GRADCHECK_TOLERANCE = 2e-3
GRADCHECK_SCALE_FLOOR = 1e-4
