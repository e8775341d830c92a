"""
Parameter file for get_noise_statistics
"""

ALL_NOISE_TEST_PARAMS = [
    {
        "tool_name": "get_noise_statistics",
        "seed": 7,
        "lam": 0.3,
        "samples": 10000,
        "xi": "gaussian",
        "_output_file": "get_noise_statistics_gaussian.json"
    },
    {
        "tool_name": "get_noise_statistics",
        "seed": 11,
        "lam": 0.0,
        "samples": 2000,
        "xi": "raised-cosine",
        "convention": "real",
        "_output_file": "get_noise_statistics_real.json"
    },
]
