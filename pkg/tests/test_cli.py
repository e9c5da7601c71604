import io
import json

import jsonschema
import pytest

from pathshap import cli

try:
    from importlib.resources import files

    SCHEMA = json.loads(
        files("pathshap").joinpath("report_schema.json").read_text()
    )
except FileNotFoundError:  # pragma: no cover
    SCHEMA = None

CHAIN3 = "u1 a u2 n\nu2 b u3 n\nu3 c u4 n\n"


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out=out)
    return code, out.getvalue()


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.graph"
    path.write_text(CHAIN3)
    return str(path)


# --- eval -------------------------------------------------------------------

def test_eval_true_and_false(fig_graph_text):
    code, out = run(
        ["eval", "--graph", str(fig_graph_text), "--query", "(x, a b c, y)", "--bind", "x=v1,y=v6"]
    )
    assert (code, out) == (0, "1\n")
    code, out = run(
        ["eval", "--graph", str(fig_graph_text), "--query", "(x, a b c, y)", "--bind", "x=v3,y=v5"]
    )
    assert (code, out) == (0, "0\n")


def test_eval_crpq_binding(fig_graph_text):
    base = ["eval", "--graph", str(fig_graph_text), "--query", "(x1, a*, x2) & (x2, b*, x3)"]
    assert run(base + ["--bind", "x1=v1,x2=v2,x3=v6"]) == (0, "1\n")
    assert run(base + ["--bind", "x1=v1,x2=v3,x3=v6"]) == (0, "0\n")


def test_eval_errors_exit_2(fig_graph_text):
    code, _ = run(
        ["eval", "--graph", str(fig_graph_text), "--query", "(x, a b c, y)", "--bind", "x=v1"]
    )
    assert code == 2
    code, _ = run(
        ["eval", "--graph", "/nonexistent.graph", "--query", "(x, a, y)", "--bind", "x=v1,y=v2"]
    )
    assert code == 2
    code, _ = run(
        ["eval", "--graph", str(fig_graph_text), "--query", "(x, a(, y)", "--bind", "x=v1,y=v2"]
    )
    assert code == 2


# --- answers ----------------------------------------------------------------

def test_answers_sorted_rows(fig_graph_text):
    code, out = run(["answers", "--graph", str(fig_graph_text), "--query", "(x, a b*, y)"])
    assert code == 0
    rows = [tuple(line.split("\t")) for line in out.splitlines()]
    assert ("v1", "v6") in rows and ("v4", "v3") in rows
    assert rows == sorted(rows)


def test_answers_overflow_exit_3(fig_graph_text):
    code, _ = run(
        ["answers", "--graph", str(fig_graph_text), "--query", "(x, .*, y)", "--cap", "3"]
    )
    assert code == 3


# --- shapley ----------------------------------------------------------------

def test_shapley_table_golden(fig_graph_text):
    code, out = run(
        [
            "shapley",
            "--graph", str(fig_graph_text),
            "--query", "(x, a b c, y)",
            "--bind", "x=v1,y=v6",
        ]
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "id\tvalue\tmethod"
    # positive values first (sorted descending), zeros after
    assert lines[1].startswith("v1->v3\t1/3")
    assert lines[2].startswith("v3->v5\t1/3")
    assert lines[3].startswith("v5->v6\t1/3")
    assert all("\t0\t" in line for line in lines[4:])


def test_shapley_json_validates_schema(fig_graph_text):
    code, out = run(
        [
            "shapley",
            "--graph", str(fig_graph_text),
            "--query", "(x, a b*, y)",
            "--bind", "x=v1,y=v6",
            "--format", "json",
        ]
    )
    assert code == 0
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    values = {row["id"]: row["value"] for row in payload["players"]}
    assert values["v1->v2"] == "7/12"
    assert values["v2->v6"] == "1/4"
    assert values["v2->v4"] == values["v4->v6"] == "1/12"


def test_shapley_sampled_json_validates_schema(chain_file):
    code, out = run(
        [
            "shapley",
            "--graph", chain_file,
            "--query", "(x, a b c, y)",
            "--bind", "x=u1,y=u4",
            "--mode", "approx-additive",
            "--eps", "0.2",
            "--delta", "0.1",
            "--seed", "7",
            "--format", "json",
        ]
    )
    assert code == 0
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    assert payload["method"] == "mc-additive"
    for row in payload["players"]:
        assert row["samples"] == 38  # ceil(ln(20) / (2 * 0.04))
        assert row["seed"] == 7
        assert abs(row["value"] - 1 / 3) <= 0.2


def test_shapley_csv_format(chain_file):
    code, out = run(
        [
            "shapley",
            "--graph", chain_file,
            "--query", "(x, a b, y)",
            "--bind", "x=u1,y=u3",
            "--format", "csv",
        ]
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "id,value,method"
    assert lines[1] == "u1->u2,1/2,exact-poly"
    assert lines[2] == "u2->u3,1/2,exact-poly"


def test_shapley_vertex_kind(chain_file):
    code, out = run(
        [
            "shapley",
            "--graph", chain_file,
            "--query", "(x, a b c, y)",
            "--bind", "x=u1,y=u4",
            "--player-kind", "vertex",
            "--format", "csv",
        ]
    )
    assert code == 0
    lines = out.splitlines()
    assert all(line.endswith("1/4,exact-subset") for line in lines[1:5])


def test_shapley_multiplicative_infinite_exit_4(fig_graph_text):
    code, _ = run(
        [
            "shapley",
            "--graph", str(fig_graph_text),
            "--query", "(x, a b*, y)",
            "--bind", "x=v1,y=v6",
            "--mode", "approx-multiplicative",
        ]
    )
    assert code == 4


def test_shapley_exact_over_cap_exit_3(fig_graph_text):
    code, _ = run(
        [
            "shapley",
            "--graph", str(fig_graph_text),
            "--query", "(x, a b c, y)",
            "--bind", "x=v1,y=v6",
            "--mode", "exact",
            "--cap", "3",
        ]
    )
    assert code == 3


# --- nonzero ----------------------------------------------------------------

def test_nonzero_verdicts(fig_graph_text):
    base = [
        "nonzero",
        "--graph", str(fig_graph_text),
        "--query", "(x, .*, y)",
        "--bind", "x=v1,y=v6",
    ]
    assert run(base + ["--focus", "v4->v3"]) == (0, "true\n")
    code, out = run(base + ["--focus", "v9->v9"])
    assert code == 2


def test_nonzero_false_for_stray_edge(tmp_path):
    path = tmp_path / "stray.graph"
    path.write_text(CHAIN3 + "u5 a u6 n\n")
    code, out = run(
        [
            "nonzero",
            "--graph", str(path),
            "--query", "(x, .*, y)",
            "--bind", "x=u1,y=u4",
            "--focus", "u5->u6",
        ]
    )
    assert (code, out) == (0, "false\n")


def test_nonzero_unknown_on_budget_exit_5(fig_graph_text):
    code, out = run(
        [
            "nonzero",
            "--graph", str(fig_graph_text),
            "--query", "(x, .*, y)",
            "--bind", "x=v1,y=v6",
            "--focus", "v4->v3",
            "--budget", "1",
        ]
    )
    assert (code, out) == (5, "unknown\n")


def test_nonzero_requires_focus(fig_graph_text):
    code, _ = run(
        [
            "nonzero",
            "--graph", str(fig_graph_text),
            "--query", "(x, .*, y)",
            "--bind", "x=v1,y=v6",
        ]
    )
    assert code == 2


# --- determinism ------------------------------------------------------------

def test_sampled_reports_byte_identical(chain_file):
    argv = [
        "shapley",
        "--graph", chain_file,
        "--query", "(x, a b c, y)",
        "--bind", "x=u1,y=u4",
        "--mode", "approx-additive",
        "--eps", "0.2",
        "--delta", "0.1",
        "--seed", "123",
        "--format", "json",
    ]
    assert run(argv) == run(argv)
    different = run(argv[:-3] + ["124", "--format", "json"])
    assert different != run(argv)
