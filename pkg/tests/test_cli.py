import json
from fractions import Fraction

import numpy as np
import pytest

from permcomplex import exactla as la
from permcomplex import grp, rep
from permcomplex.cli import ScenarioConfig, run, serialize
from permcomplex.cli.main import main
from permcomplex.homalg import ChainComplex, sequences


def _ind_theta():
    G = grp.g24()
    return rep.induce(rep.character_module(rep.theta(), la.PLocal(3)), G.subgroups["Q8"], name="Ind_Q8(theta)")


def test_module_round_trip(tmp_path):
    M = _ind_theta()
    path = tmp_path / "m.json"
    serialize.write(path, serialize.module_to_dict(M))
    N = serialize.load(path)
    assert N.group is M.group and N.ring == M.ring
    assert np.array_equal(N.dense(), M.dense())


def test_builtin_group_serialised_by_name():
    d = serialize.module_to_dict(_ind_theta())
    assert d["group"] == {"constructor": "G24"}
    assert serialize.group_to_dict(grp.n_level(2)) == {"constructor": "N2", "params": {"k": 2}}


def test_custom_group_round_trip():
    G, _ = grp.d6_quotient()
    H = serialize.group_from_dict(json.loads(json.dumps(serialize.group_to_dict(G))))
    assert np.array_equal(H.mult, G.mult) and H.labels == G.labels


def test_fraction_entries_round_trip():
    a = np.array([[Fraction(1, 2), 0], [0, 1]], dtype=object)
    assert np.array_equal(serialize.decode_matrix(serialize.encode_matrix(a)), a)


def test_corrupted_module_names_failing_pair():
    d = serialize.module_to_dict(_ind_theta())
    d["generators"]["ω²"][0][0] = 2
    with pytest.raises(serialize.AuditFailure) as e:
        serialize.module_from_dict(d)
    assert e.value.pair is not None and len(e.value.pair) == 2


def test_complex_round_trip(tmp_path):
    C = sequences.d6_sequence()
    path = tmp_path / "c.json"
    serialize.write(path, serialize.complex_to_dict(C))
    D = serialize.load(path)
    assert D.ranks() == C.ranks()
    for a, b in zip(C.diffs, D.diffs):
        assert np.array_equal(a.matrix, b.matrix)


def test_unknown_scenario_gives_error_report():
    r = run(ScenarioConfig("no-such-scenario"))
    d = r.to_dict()
    assert not r.passed and "error" in d and "checks" not in d


def test_deep_tower_refused():
    r = run(ScenarioConfig("sequence-1-tower", tower_max_k=5))
    assert r.error and "refused" in r.error


def test_nonpositive_bounds_refused():
    assert run(ScenarioConfig("sequence-d6", precision=0)).error


def test_reports_carry_provenance():
    r = run(ScenarioConfig("sequence-d6"))
    assert r.passed
    for c in r.to_dict()["checks"]:
        assert c["provenance"] in ("published", "trivial", "derived")


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "cohomology-ledger", "--quiet", "--out", str(a)]) == 0
    assert main(["verify", "cohomology-ledger", "--quiet", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_timing_is_opt_in():
    assert "timing_seconds" not in run(ScenarioConfig("sd16-simples")).to_dict()
    assert "timing_seconds" in run(ScenarioConfig("sd16-simples"), timing=True).to_dict()


def test_verify_exit_codes(capsys):
    assert main(["verify", "sd16-simples", "--quiet"]) == 0
    assert main(["verify", "bogus"]) == 2
    out = capsys.readouterr().out
    assert '"error"' in out


def test_decompose_command(tmp_path, capsys):
    R = la.Truncation(3, 3)
    G = grp.g24()
    M = rep.induce(rep.trivial(grp.c3(), R), G.subgroups["C3"], name="Ind_C3")
    path = tmp_path / "m.json"
    serialize.write(path, serialize.module_to_dict(M))
    assert main(["decompose", str(path), "--basis-changes", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert sum(s["rank"] * s["multiplicity"] for s in out["summands"]) == 8


def test_decompose_checks_precision_bump_for_signed_action(tmp_path, capsys):
    R = la.Truncation(3, 4)
    M = rep.induce(rep.character_module(rep.theta(), R), grp.g24().subgroups["Q8"])
    path = tmp_path / "m.json"
    serialize.write(path, serialize.module_to_dict(M))
    assert main(["decompose", str(path), "--basis-changes", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["stable_under_precision_bump"] is True
    assert out["flags"] == []


def test_resolve_command(tmp_path, capsys):
    path = tmp_path / "t.json"
    serialize.write(path, serialize.module_to_dict(rep.trivial(grp.g24(), la.PrimeField(3))))
    assert main(["resolve", str(path), "--length", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    col = out["multiplicities"]["columns"].index("triv")
    assert [row[col] for row in out["multiplicities"]["rows"]] == [1, 0, 0, 1, 1]


def test_check_command(tmp_path, capsys):
    path = tmp_path / "c.json"
    serialize.write(path, serialize.complex_to_dict(sequences.d6_sequence()))
    assert main(["check", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["exact"] is True


def test_check_command_reports_nonexact(tmp_path, capsys):
    G = grp.g24()
    R = la.PLocal(3)
    M, N = rep.trivial(G, R), rep.trivial(G, R)
    C = ChainComplex([M, N], [rep.ModuleHom(M, N, np.array([[3]]))])
    path = tmp_path / "c.json"
    serialize.write(path, serialize.complex_to_dict(C))
    assert main(["check", str(path)]) == 1


def test_load_errors_are_reported(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", str(bad)]) == 2
    assert main(["resolve", str(tmp_path / "missing.json"), "--length", "1"]) == 2
