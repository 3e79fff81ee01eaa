import json
import re

import numpy as np
import pytest

from discordkit import fileio
from discordkit.cli import main


@pytest.fixture
def gen(tmp_path):
    def _gen(name, *params, seed=0):
        state = tmp_path / f"{name}{''.join(map(str, params))}.json"
        obs = tmp_path / f"{name}{''.join(map(str, params))}.obs.json"
        code = main(["gen", name, *map(str, params), "--seed", str(seed), "--out", str(state), "--obs-out", str(obs)])
        assert code == 0
        return str(state), str(obs)

    return _gen


def table(text):
    """Label -> value for every numeric row of a text report."""
    rows = {}
    section = None
    for line in text.splitlines():
        if line.startswith("== "):
            section = line[3:]
        else:
            m = re.match(r"\s+(.*?)\s{2,}(-?[0-9.]+(?:e[-+][0-9]+)?)$", line)
            if m:
                rows[(section, m.group(1))] = m.group(2)
    return rows


def test_analyze_bell(gen, capsys):
    code = main(["analyze", *gen("bell")])
    out = capsys.readouterr().out
    assert code == 0
    rows = table(out)
    split = "mutual information split (bits)"
    assert rows[(split, "information gain")] == "1.000000"
    assert rows[(split, "discord")] == "1.000000"
    assert rows[(split, "residual correlations")] == "0.000000"
    assert rows[(split, "mutual information")] == "2.000000"


def test_analyze_product_has_no_correlations(gen, capsys):
    assert main(["analyze", *gen("product")]) == 0
    rows = table(capsys.readouterr().out)
    for key in ("mutual information", "information gain", "discord", "residual correlations"):
        assert rows[("mutual information split (bits)", key)] == "0.000000"


def test_malformed_dims_exit_code(tmp_path, gen, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dims": [2, "x"], "re": [[1]], "im": [[0]]}')
    _, obs = gen("bell")
    assert main(["analyze", str(bad), obs]) == 2
    assert "dims[1]" in capsys.readouterr().err


def test_dimension_mismatch_exit_code(gen, capsys):
    state, _ = gen("bell")
    _, obs3 = gen("example1")
    assert main(["analyze", state, obs3]) == 3
    assert "dimension" in capsys.readouterr().err


def test_internal_check_failure_exit_code(gen, capsys):
    # a tolerance below round-off makes the asserted identities fail
    assert main(["analyze", *gen("random_bipartite", 3, 3, 4), "--tol", "1e-30"]) == 4
    assert "internal check failed" in capsys.readouterr().err


def test_unknown_fixture(capsys):
    assert main(["gen", "nosuch"]) == 2
    assert "unknown fixture" in capsys.readouterr().err


def test_gen_rejects_bad_parameters(capsys):
    assert main(["gen", "bell", "3"]) == 2
    assert main(["gen", "random_bipartite", "3"]) == 2


def test_chain_ledgers(gen, capsys):
    expected = {
        "bell": ["0.000000", "0.000000", "0.000000", "1.000000", "0.000000"],
        "classical_classical": ["0.000000", "0.000000", "0.000000", "0.000000", "1.000000"],
    }
    labels = ["redundant-noise", "essential-noise", "garbled", "pure-quantum", "quasi-classical"]
    for name, values in expected.items():
        assert main(["chain", *gen(name)]) == 0
        rows = table(capsys.readouterr().out)
        assert [rows[("noise ledger (bits)", k)] for k in labels] == values
    assert main(["chain", *gen("example1")]) == 0
    assert table(capsys.readouterr().out)[("noise ledger (bits)", "redundant-noise")] == "0.500000"


def test_classify_lines(gen, capsys):
    for name, kind in (("classical_classical", "StrongZero"), ("weakzero", "WeakZero"), ("bell", "Positive")):
        assert main(["classify", *gen(name)]) == 0
        assert capsys.readouterr().out.strip().splitlines()[-1] == kind


def test_measure_bell(gen, capsys):
    assert main(["measure", *gen("bell")]) == 0
    out = capsys.readouterr().out
    rows = table(out)
    assert float(rows[("summary", "max residual split")]) < 1e-8
    assert float(rows[("summary", "max residual entropy")]) < 1e-8
    assert out.strip().endswith("PASS all identities within 1e-08")


def test_measure_random_seed(gen, capsys):
    assert main(["measure", *gen("random_bipartite", 2, 3, seed=5)]) == 0
    assert "PASS" in capsys.readouterr().out


def test_gen_random_bipartite_rank(gen):
    state, _ = gen("random_bipartite", 3, 3, 4, seed=7)
    s = fileio.read_state(state)
    assert s.dims == (3, 3)
    assert np.linalg.matrix_rank(s.matrix, tol=1e-10) == 4


def test_gen_is_deterministic(tmp_path, capsys):
    assert main(["gen", "random_bipartite", "2", "2", "--seed", "3"]) == 0
    first = capsys.readouterr().out
    assert main(["gen", "random_bipartite", "2", "2", "--seed", "3"]) == 0
    assert capsys.readouterr().out == first
    assert main(["gen", "random_bipartite", "2", "2", "--seed", "4"]) == 0
    assert capsys.readouterr().out != first


def test_gen_example1_matches_fixture(gen):
    from discordkit.fixtures import example1

    state, obs = gen("example1")
    assert np.array_equal(fileio.read_state(state).matrix, example1()[0].matrix)
    assert len(fileio.read_observable(obs)) == 3


@pytest.mark.parametrize("verb", ["analyze", "chain", "classify", "measure"])
def test_json_output_is_stable_and_complete(verb, gen, tmp_path, capsys):
    files = gen("random_bipartite", 2, 2, 3, seed=11)
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main([verb, *files, "--json", "--out", str(out1)]) == 0
    assert main([verb, *files, "--json", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert main([verb, *files]) == 0
    for (section, label), text in table(capsys.readouterr().out).items():
        value = report[section][label]
        if "e" in text:
            assert f"{value:.3e}" == text
        elif "." not in text:
            assert str(value) == text
        else:
            assert f"{value + 0.0:.6f}".replace("-0.000000", "0.000000") == text
