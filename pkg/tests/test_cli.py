import json
import math

import pytest

from ellipse_caustics import billiard
from ellipse_caustics.cli import main
from ellipse_caustics.const import (
    EXIT_CLOSURE_FAILURE,
    EXIT_ISOTROPIC_DEGENERATION,
    EXIT_OK,
    EXIT_USAGE,
)


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_caustics_triangles(capsys):
    code, out = _run(capsys, "caustics", "--a", "2", "--b", "1", "--n", "3")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["N"] == 2
    assert [round(root["re"], 4) for root in payload["roots"]] == [-0.9827, 5.4272]
    assert {root["kind"] for root in payload["roots"]} == {"ellipse"}
    assert payload["family"] == {"a2": "4", "b2": "1"}


def test_caustics_quads(capsys):
    code, out = _run(capsys, "caustics", "--n", "4")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert [root["exact"] for root in payload["roots"]] == ["-4/3", "-4/5", "4/3"]
    assert payload["roots"][0]["kind"] == "hyperbola"
    assert payload["squarefree"] is True


def test_caustics_circle(capsys):
    code, out = _run(capsys, "caustics", "--a", "1", "--b", "1", "--n", "5")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["circle"] is True
    assert payload["degree"] == 2


def test_caustics_csv(capsys):
    code, out = _run(capsys, "caustics", "--n", "4", "--format", "csv")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "index,re,im,multiplicity,admissible,kind,exact"
    assert len(lines) == 4


def test_caustics_is_deterministic(capsys):
    _, first = _run(capsys, "caustics", "--n", "5")
    _, second = _run(capsys, "caustics", "--n", "5")
    assert first == second


def test_invalid_config_is_a_usage_error(capsys):
    assert main(["caustics", "--a", "0"]) == EXIT_USAGE
    assert main(["caustics", "--n", "2"]) == EXIT_USAGE
    assert main(["caustics", "--format", "svg"]) == EXIT_USAGE


def test_orbit_at_a_root_closes(capsys):
    code, out = _run(capsys, "orbit", "--n", "3", "--root", "0", "--theta", "0.3")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["closure_residual"] <= 1e-7
    assert len(payload["vertices"]) == 4


def test_orbit_through_the_complex_chord(capsys):
    code, out = _run(
        capsys, "orbit", "--n", "4", "--lambda", "1.3333333333333333", "--start=-2,0"
    )
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["closure_residual"] <= 1e-7
    assert max(payload["residuals"]["tangency"]) <= 1e-9
    assert max(payload["residuals"]["reflection"]) <= 1e-9
    targets = [(-8 / 3, sign * math.sqrt(7) / 3) for sign in (1, -1)]
    hits = 0
    for vertex in payload["vertices"]:
        (xr, xi), (yr, yi), (zr, zi) = vertex
        z = complex(zr, zi)
        if abs(z) < 1e-9:
            continue
        x, y = complex(xr, xi) / z, complex(yr, yi) / z
        hits += any(abs(x - tx) < 1e-6 and abs(y - 1j * ty) < 1e-6 for tx, ty in targets)
    assert hits >= 1


def test_orbit_off_a_root_fails_to_close(capsys):
    code, out = _run(capsys, "orbit", "--n", "3", "--lambda", "10")
    assert code == EXIT_CLOSURE_FAILURE
    assert json.loads(out)["closure_residual"] > 1e-7


@pytest.mark.parametrize(
    "argv",
    [
        ["orbit", "--n", "3"],
        ["orbit", "--n", "3", "--lambda", "1", "--root", "0"],
        ["orbit", "--n", "3", "--root", "9"],
        ["orbit", "--n", "3", "--lambda", "-1"],
        ["orbit", "--n", "3", "--lambda", "1", "--start", "0,0,0"],
        ["orbit", "--n", "3", "--lambda", "1", "--start", "0,1", "--theta", "0.2"],
    ],
)
def test_orbit_usage_errors(capsys, argv):
    assert main(argv) == EXIT_USAGE


def test_orbit_writes_to_a_file(capsys, tmp_path):
    target = tmp_path / "trace.json"
    code, out = _run(capsys, "orbit", "--n", "3", "--root", "1", "--out", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["n"] == 3


def test_plot_caustics_svg(capsys):
    code, out = _run(capsys, "plot", "--n", "4", "--what", "caustics")
    assert code == EXIT_OK
    assert "<svg" in out
    _, again = _run(capsys, "plot", "--n", "4", "--what", "caustics")
    assert out == again


def test_plot_rhombus_csv(capsys):
    code, out = _run(
        capsys,
        "plot", "--n", "4", "--lambda", "-0.8", "--start=-2,0", "--what", "orbit", "--format", "csv",
    )
    assert code == EXIT_OK
    orbit_rows = [line for line in out.splitlines() if line.startswith("orbit,")]
    assert len(orbit_rows) == 5


def test_plot_rejects_json(capsys):
    assert main(["plot", "--format", "json"]) == EXIT_USAGE


def test_verify_selected_suites(capsys):
    code, out = _run(
        capsys, "verify", "--suite", "examples", "--suite", "special_quads", "--samples", "2"
    )
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["passed"] is True
    assert [suite["key"] for suite in payload["suites"]] == ["examples", "special_quads"]


def test_unknown_subcommand_exits_with_usage():
    with pytest.raises(SystemExit) as excinfo:
        main(["wander"])
    assert excinfo.value.code == EXIT_USAGE


def test_verify_prints_a_summary(capsys):
    code = main(["verify", "--suite", "examples", "--format", "csv"])
    captured = capsys.readouterr()
    assert code == EXIT_OK
    assert captured.out.splitlines()[0] == "suite,check,passed,detail"
    assert "Reference examples: 3 checks ok" in captured.err


def test_orbit_accepts_an_exact_lambda(capsys):
    code, out = _run(capsys, "orbit", "--n", "4", "--lambda", "4/3", "--start=-2,0")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["lambda"] == {"re": 4 / 3, "im": 0.0}


@pytest.mark.parametrize("branch", ["0", "1"])
def test_orbit_from_an_isotropic_tangency_point(capsys, branch):
    # θ = i·ln√3 is the point (4/√3, i/√3), whose ellipse tangent passes through a cyclic point
    theta = f"{math.log(3) / 2!r}i"
    assert main(["orbit", "--n", "3", "--lambda", "1", "--theta", theta, "--branch", branch]) == (
        EXIT_ISOTROPIC_DEGENERATION
    )


def test_orbit_fails_when_the_reflection_law_does(capsys, monkeypatch):
    monkeypatch.setattr(billiard, "_reflection_residual", lambda *args: 1.0)
    code, out = _run(capsys, "orbit", "--n", "3", "--root", "0", "--format", "csv")
    assert code == EXIT_CLOSURE_FAILURE
    assert out.startswith("index,")
