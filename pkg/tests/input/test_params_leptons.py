"""
Parameter file for get_lepton_fit
"""

ALL_LEPTONS_TEST_PARAMS = [
    # defaults are the measured lepton masses
    {
        "tool_name": "get_lepton_fit",
        "_expect_passed": True,
        "_output_file": "get_lepton_fit_defaults.json"
    },
    {
        "tool_name": "get_lepton_fit",
        "n_max": 5,
        "_expect_passed": True,
        "_output_file": "get_lepton_fit_n_max_5.json"
    },
    # degenerate masses are a domain error
    {
        "tool_name": "get_lepton_fit",
        "m_e": 1.0,
        "m_mu": 1.0,
        "m_tau": 2.0,
        "_expect_passed": False,
        "_output_file": "get_lepton_fit_degenerate.json"
    },
]
