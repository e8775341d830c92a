"""
Parameter file for the algebra tools (check_algebra, get_deformed_spectrum)
"""

ALL_ALGEBRA_TEST_PARAMS = [
    # q-boson relation at the acceptance dimension
    {
        "tool_name": "check_algebra",
        "which": "qboson",
        "lam": 0.5,
        "dim": 32,
        "_expect_passed": True,
        "_output_file": "check_algebra_qboson.json"
    },
    {
        "tool_name": "check_algebra",
        "which": "qboson",
        "lam": 1.0,
        "dim": 32,
        "_expect_passed": True,
        "_output_file": "check_algebra_qboson_lambda1.json"
    },
    # negative control: f = 1 cannot satisfy the q-relation
    {
        "tool_name": "check_algebra",
        "which": "qboson",
        "lam": 1.0,
        "dim": 32,
        "force_f_identity": True,
        "_expect_passed": False,
        "_output_file": "check_algebra_negative_control.json"
    },
    {
        "tool_name": "check_algebra",
        "which": "general",
        "dim": 24,
        "gh": "damped",
        "_expect_passed": True,
        "_output_file": "check_algebra_general_damped.json"
    },
    {
        "tool_name": "check_algebra",
        "which": "jordan-schwinger-boson",
        "lam": 0.5,
        "dim": 12,
        "margin": 2,
        "_expect_passed": True,
        "_output_file": "check_algebra_js_boson.json"
    },
    {
        "tool_name": "check_algebra",
        "which": "jordan-schwinger-fermion",
        "lam": 0.5,
        "_expect_passed": True,
        "_output_file": "check_algebra_js_fermion.json"
    },
    {
        "tool_name": "get_deformed_spectrum",
        "lam": 0.8,
        "n_max": 8,
        "_expect_passed": True,
        "_output_file": "get_deformed_spectrum.json"
    },
]
