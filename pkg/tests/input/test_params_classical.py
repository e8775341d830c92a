"""
Parameter file for get_classical_frequency
"""

ALL_CLASSICAL_TEST_PARAMS = [
    {
        "tool_name": "get_classical_frequency",
        "lam": 0.5,
        "q0": 2.0,
        "p0": 0.0,
        "_expect_passed": True,
        "_output_file": "get_classical_frequency_rk4.json"
    },
    {
        "tool_name": "get_classical_frequency",
        "lam": 0.3,
        "q0": 1.0,
        "p0": 1.0,
        "integrator": "midpoint",
        "_expect_passed": True,
        "_output_file": "get_classical_frequency_midpoint.json"
    },
    {
        "tool_name": "get_classical_frequency",
        "scan": True,
        "_expect_passed": True,
        "_output_file": "get_classical_frequency_scan.json"
    },
]
