import io
import json

from eqbench import cli
from eqbench.models import make_algebra, record_line
from eqbench.terms import Op


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# enumerate

def test_enumerate_count_c1_size1(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", "C1", "--size", "1", "--count")
    assert code == 0 and out == "1\n"


def test_enumerate_count_unconstrained_prod(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", "none", "--ops", "prod",
                       "--size", "2", "--count")
    assert code == 0 and out == "16\n"


def test_enumerate_count_c1_size2(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", "C1", "--size", "2", "--count")
    assert code == 0 and out == "128\n"


def test_enumerate_records_are_valid_json(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", "C0", "--size", "2",
                       "--format", "records")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 16
    for line in lines:
        rec = json.loads(line)
        assert set(rec) == {"size", "ops", "constants"}


def test_enumerate_resource_cap_exit_code(capsys):
    code, _, err = run(capsys, "enumerate", "--system", "Mx_neutral", "--size", "4",
                       "--count")
    assert code == cli.EXIT_RESOURCE
    assert "limit" in err


def test_enumerate_unknown_system_is_config_error(capsys):
    code, _, err = run(capsys, "enumerate", "--system", "C9", "--size", "2", "--count")
    assert code == cli.EXIT_CONFIG
    assert "unknown system" in err


def test_enumerate_parallel_streams_identical(capsys):
    args = ["enumerate", "--system", "C0", "--size", "3", "--format", "records"]
    code, base, _ = run(capsys, *args, "--parallel", "1")
    assert code == 0
    code, wide, _ = run(capsys, *args, "--parallel", "8")
    assert code == 0
    assert base == wide


def test_enumerate_cache_cold_and_warm_byte_identical(tmp_path, capsys):
    args = ["enumerate", "--system", "C1", "--size", "2", "--format", "records",
            "--cache-dir", str(tmp_path)]
    code, cold, _ = run(capsys, *args)
    assert code == 0
    cached_files = list(tmp_path.glob("*.jsonl"))
    assert len(cached_files) == 1
    code, warm, _ = run(capsys, *args)
    assert code == 0
    assert cold == warm


def test_cache_shared_between_renamed_but_equal_systems(tmp_path, capsys):
    eqfile = tmp_path / "my_c1.eq"
    eqfile.write_text("xy = yx\nx:y = x/y\n")
    run(capsys, "enumerate", "--system", "C1", "--size", "2", "--count",
        "--cache-dir", str(tmp_path / "cache"))
    run(capsys, "enumerate", "--system", str(eqfile), "--size", "2", "--count",
        "--cache-dir", str(tmp_path / "cache"))
    assert len(list((tmp_path / "cache").glob("*.jsonl"))) == 1


def test_cache_env_var_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    code, _, _ = run(capsys, "enumerate", "--system", "C1", "--size", "2", "--count")
    assert code == 0
    assert list(tmp_path.glob("*.jsonl"))


# ---------------------------------------------------------------------------
# check

def _write_algebra(path, **kw):
    table_z2 = [[0, 1], [1, 0]]
    tables = {Op.PROD: table_z2, Op.LDIV: table_z2, Op.RDIV: table_z2}
    alg = make_algebra(2, tables, kw.get("constants", {}))
    path.write_text(record_line(alg) + "\n")


def test_check_size_one_satisfies_c0(tmp_path, capsys):
    f = tmp_path / "one.jsonl"
    f.write_text('{"size":1,"ops":{"prod":[[0]],"ldiv":[[0]],"rdiv":[[0]]},"constants":{}}\n')
    code, out, _ = run(capsys, "check", "--system", "C0", "--algebra", str(f))
    assert code == 0 and out == "satisfies C0\n"


def test_check_z2_triple_satisfies_c0(tmp_path, capsys):
    f = tmp_path / "z2.jsonl"
    _write_algebra(f)
    code, out, _ = run(capsys, "check", "--system", "C0", "--algebra", str(f))
    assert code == 0 and "satisfies" in out


def test_check_missing_table_is_input_error(tmp_path, capsys):
    f = tmp_path / "prodonly.jsonl"
    f.write_text('{"size":2,"ops":{"prod":[[0,1],[1,0]]},"constants":{}}\n')
    code, _, err = run(capsys, "check", "--system", "C0", "--algebra", str(f))
    assert code == cli.EXIT_CONFIG
    assert "missing table ldiv" in err


def test_check_failure_reports_witness_and_exit1(tmp_path, capsys):
    f = tmp_path / "bad.jsonl"
    f.write_text('{"size":2,"ops":{"prod":[[0,0],[1,0]]},"constants":{}}\n')
    code, out, _ = run(capsys, "check", "--system", "C1", "--algebra", str(f),
                       "--format", "records")
    assert code == cli.EXIT_NEGATIVE
    rec = json.loads(out)
    assert rec["satisfies"] is False
    assert rec["failed_equation"] == "a b = b a"
    assert rec["witness"] == {"a": 0, "b": 1}


def test_check_missing_file_is_io_error(capsys):
    code, _, err = run(capsys, "check", "--system", "C0", "--algebra",
                       "/nonexistent/path.jsonl")
    assert code == cli.EXIT_IO


# ---------------------------------------------------------------------------
# prove / refute

def test_prove_c0_coincidence(capsys):
    code, out, _ = run(capsys, "prove", "--system", "C0", "ab = b/a")
    assert code == 0
    assert out.startswith("proved: a b = b/a")
    steps = [l for l in out.splitlines() if l.strip() and l.strip()[0].isdigit()]
    assert 1 <= len(steps) <= 3


def test_prove_reflexive(capsys):
    code, out, _ = run(capsys, "prove", "--system", "C1", "a = a")
    assert code == 0 and "reflexivity" in out


def test_prove_unknown_exits_nonzero(capsys):
    code, out, _ = run(capsys, "prove", "--system", "none", "ab = ba")
    assert code == cli.EXIT_NEGATIVE and "unknown" in out


def test_prove_bad_identity_is_config_error(capsys):
    code, _, err = run(capsys, "prove", "--system", "C1", "ab = = ba")
    assert code == cli.EXIT_CONFIG


def test_refute_empty_system_commutativity(capsys):
    code, out, _ = run(capsys, "refute", "--system", "none", "ab = ba",
                       "--max-size", "2")
    assert code == 0
    assert "refuted" in out and "prod=[[0,0],[1,0]]" in out


def test_refute_records(capsys):
    code, out, _ = run(capsys, "refute", "--system", "none", "ab = ba",
                       "--max-size", "2", "--format", "records")
    assert code == 0
    rec = json.loads(out)
    assert rec["verdict"] == "refuted"
    assert rec["countermodel"]["ops"]["prod"] == [[0, 0], [1, 0]]
    assert rec["witness"] == {"a": 0, "b": 1}


def test_refute_holds_exits_nonzero(capsys):
    code, out, _ = run(capsys, "refute", "--system", "C0", "ab = b/a",
                       "--max-size", "2")
    assert code == cli.EXIT_NEGATIVE and "holds" in out


# ---------------------------------------------------------------------------
# compare / rank

def test_compare_equivalent(capsys):
    code, out, _ = run(capsys, "compare", "C1", "C1")
    assert code == 0 and "equivalent" in out


def test_compare_superset_not_second_stronger(tmp_path, capsys):
    eqfile = tmp_path / "extra.eq"
    eqfile.write_text("a:b = b:a\n")
    # C2 plus its own first axiom vs C2: must not be weaker
    code, out, _ = run(capsys, "compare", "C2", str(eqfile), "--format", "records")
    assert code == 0
    rec = json.loads(out)
    assert rec["relation"] in ("equivalent", "first-stronger", "incomparable")


def test_rank_records_shape(capsys):
    code, out, _ = run(capsys, "rank", "C0", "C1", "C2", "C3", "--format", "records")
    assert code == 0
    rec = json.loads(out)
    assert rec["systems"] == ["C0", "C1", "C2", "C3"]
    assert rec["budgets"]["model_size"] == 2


def test_rank_parallel_byte_identical(capsys):
    code, one, _ = run(capsys, "rank", "C0", "C1", "C2", "C3",
                       "--format", "records", "--parallel", "1")
    assert code == 0
    code, eight, _ = run(capsys, "rank", "C0", "C1", "C2", "C3",
                         "--format", "records", "--parallel", "8")
    assert code == 0
    assert one == eight


# ---------------------------------------------------------------------------
# classify

def test_classify_z3_addition_is_abelian_group(tmp_path, capsys):
    z3 = [[(i + j) % 3 for j in range(3)] for i in range(3)]
    f = tmp_path / "z3.jsonl"
    f.write_text(record_line(make_algebra(3, {Op.PROD: z3})) + "\n")
    code, out, _ = run(capsys, "classify", "--algebra", str(f), "--format", "records")
    assert code == 0
    rec = json.loads(out)
    assert rec["ops"]["prod"]["is_abelian_group"] is True
    assert rec["ops"]["ldiv"] is None


def test_classify_piped_c0_models_all_coincide(capsys, monkeypatch):
    code, models_out, _ = run(capsys, "enumerate", "--system", "C0", "--size", "2",
                              "--format", "records")
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(models_out))
    code, out, _ = run(capsys, "classify", "--format", "records")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 16
    for line in lines:
        assert json.loads(line)["ops_coincide"] is True


# ---------------------------------------------------------------------------
# audit

def test_audit_emits_seven_reading_rows(capsys):
    code, out, _ = run(capsys, "audit", "--max-size", "2", "--format", "records")
    assert code == 0
    rows = [json.loads(l) for l in out.strip().splitlines()]
    assert len(rows) == 7
    assert {r["structure"] for r in rows} == {"G1", "G2", "G3"}
    for row in rows:
        assert set(row["sizes"]) == {"1", "2"}
        assert isinstance(row["abelian_group_claim_holds"], bool)


def test_audit_text_mode_mentions_claim(capsys):
    code, out, _ = run(capsys, "audit", "--max-size", "1")
    assert code == 0
    assert "G1 with Mx_as_printed" in out


def test_enumerate_max_results_cap_exit_code(capsys):
    code, _, err = run(capsys, "enumerate", "--system", "none", "--ops", "prod",
                       "--size", "2", "--max-results", "5", "--format", "records")
    assert code == cli.EXIT_RESOURCE
    assert "max_results" in err


def test_enumerate_max_results_cap_with_cache(tmp_path, capsys):
    args = ["enumerate", "--system", "none", "--ops", "prod", "--size", "2",
            "--max-results", "5", "--count", "--cache-dir", str(tmp_path)]
    code, _, err = run(capsys, *args)
    assert code == cli.EXIT_RESOURCE
    # warm cache must report the same breach
    code, _, err = run(capsys, *args)
    assert code == cli.EXIT_RESOURCE


def test_check_reports_each_record_on_its_own_line(tmp_path, capsys):
    f = tmp_path / "two.jsonl"
    f.write_text(
        '{"size":1,"ops":{"prod":[[0]]},"constants":{}}\n'
        '{"size":2,"ops":{"prod":[[0,0],[1,0]]},"constants":{}}\n')
    code, out, _ = run(capsys, "check", "--system", "my", "--algebra", str(f),
                       "--format", "records")
    assert code == cli.EXIT_CONFIG  # unknown system comes first
    f2 = tmp_path / "sys.eq"
    f2.write_text("ab = ba\n")
    code, out, _ = run(capsys, "check", "--system", str(f2), "--algebra", str(f),
                       "--format", "records")
    assert code == cli.EXIT_NEGATIVE
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["satisfies"] is True
    assert json.loads(lines[1])["satisfies"] is False
