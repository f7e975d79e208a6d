"""One test per acceptance criterion, at the stated tolerances.

The checks themselves live in ``affine_semigroup.verify`` so that the CLI
``verify`` subcommand and this file run the same code.
"""

import pytest

from affine_semigroup import verify as V

RESULTS = {}


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("verify")


@pytest.fixture(scope="session")
def cfg(run_dir):
    return V.VerifyConfig(out=run_dir, workers=1)


def _check(n, cfg):
    res = V.CHECKS[n](cfg)
    RESULTS[n] = res
    assert res.passed, res.line() + f"  values={res.values}"


def test_criterion_01_exact_coincidence(cfg):
    _check(1, cfg)


def test_criterion_02_stationary_moments(cfg):
    _check(2, cfg)


def test_criterion_03_sphere_vs_path_average(cfg):
    _check(3, cfg)


def test_criterion_04_start_point_independence(cfg):
    _check(4, cfg)


def test_criterion_05_existence_threshold(cfg):
    _check(5, cfg)


def test_criterion_06_contraction(cfg):
    _check(6, cfg)


def test_criterion_07_acim_support(cfg):
    _check(7, cfg)


def test_criterion_08_shift_measure_round_trip(cfg):
    _check(8, cfg)


def test_criterion_09_rotation_number(cfg):
    _check(9, cfg)


def test_criterion_10_holder_certificates(cfg):
    _check(10, cfg)


def test_criterion_11_approximation_sequence(cfg):
    _check(11, cfg)


def test_criterion_12_determinism(cfg, run_dir):
    # compares against the CSVs written by criteria 1-11 above, so run after them
    missing = [n for n in V.CHECKS if n not in RESULTS]
    if missing:
        V.run_criteria(cfg, missing)
    res = V.check_12(cfg, reference=run_dir)
    RESULTS[12] = res
    assert res.passed, res.line() + f"  values={res.values}"
