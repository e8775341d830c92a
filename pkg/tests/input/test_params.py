"""
Unified test parameter lists for the MCP server tests (by area)

- ALL_ALGEBRA_TEST_PARAMS
- ALL_LEPTONS_TEST_PARAMS
- ALL_CLASSICAL_TEST_PARAMS
- ALL_HUBBARD_TEST_PARAMS
- ALL_NOISE_TEST_PARAMS
- ALL_FIELD_TEST_PARAMS

Each list contains dicts with 'tool_name', tool arguments, '_output_file'
and, where the outcome is known, '_expect_passed'.
"""

from .test_params_algebra import ALL_ALGEBRA_TEST_PARAMS
from .test_params_classical import ALL_CLASSICAL_TEST_PARAMS
from .test_params_field import ALL_FIELD_TEST_PARAMS
from .test_params_hubbard import ALL_HUBBARD_TEST_PARAMS
from .test_params_leptons import ALL_LEPTONS_TEST_PARAMS
from .test_params_noise import ALL_NOISE_TEST_PARAMS
