import pytest

from ellipse_caustics import billiard
from ellipse_caustics.config import RunConfig
from ellipse_caustics.verify import (
    SUITE_DESCRIPTIONS,
    SuiteDescription,
    async_run_suites,
    summary_payload,
)

FAST_SUITES = [
    "algebra",
    "closed_forms",
    "examples",
    "root_location",
    "negative_control",
    "degenerate_triangles",
    "special_quads",
    "focal",
    "family",
]


@pytest.fixture
def config() -> RunConfig:
    return RunConfig.from_axes(2, 1, nmax=5, samples=3, seed=7)


def test_suite_keys_are_unique():
    keys = [description.key for description in SUITE_DESCRIPTIONS]
    assert len(keys) == len(set(keys))


@pytest.mark.asyncio
async def test_fast_suites_pass(config):
    results = await async_run_suites(config, keys=FAST_SUITES)
    assert [result.key for result in results] == FAST_SUITES
    failed = {r.key: [c for c in r.checks if not c.passed] for r in results if not r.passed}
    assert not failed


@pytest.mark.asyncio
async def test_degree_table_and_closure_grid(config):
    results = await async_run_suites(config, keys=["degree_table", "closure_grid"])
    assert all(result.passed for result in results)
    assert len(results[0].checks) == 2 * (config.nmax - 2)


@pytest.mark.asyncio
async def test_family_suite_flags_the_forbidden_root():
    config = RunConfig.from_axes("1.4142135623730951", 1, n=4)
    (result,) = await async_run_suites(config, keys=["family"])
    assert result.passed
    assert "N=2" in result.checks[0].detail


@pytest.mark.asyncio
async def test_raising_suite_is_reported(config):
    def broken(_config):
        raise RuntimeError("boom")

    descriptions = (SuiteDescription(key="broken", name="Broken", run_fn=broken),)
    (result,) = await async_run_suites(config, descriptions)
    assert not result.passed
    assert "RuntimeError: boom" in result.checks[0].detail


@pytest.mark.asyncio
async def test_summary_is_deterministic(config):
    first = summary_payload(await async_run_suites(config, keys=["examples", "focal"]))
    second = summary_payload(await async_run_suites(config, keys=["examples", "focal"]))
    assert first == second
    assert first["passed"] is True
    assert {suite["key"] for suite in first["suites"]} == {"examples", "focal"}


@pytest.mark.asyncio
async def test_closure_grid_checks_the_reflection_law(monkeypatch):
    monkeypatch.setattr(billiard, "_reflection_residual", lambda *args: 1.0)
    config = RunConfig.from_axes(2, 1, nmax=3, samples=1)
    (result,) = await async_run_suites(config, keys=["closure_grid"])
    assert not result.passed
    assert "reflection 1" in result.checks[0].detail
