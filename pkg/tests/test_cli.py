import io
import json
import subprocess
import sys


from kindiv.cli import main


def run(*argv, cache=None):
    out = io.StringIO()
    args = list(argv)
    if cache is None:
        args = ["--no-cache"] + args
    else:
        args = ["--cache-dir", str(cache)] + args
    code = main(args, out)
    return code, out.getvalue()


def test_exact_examples():
    assert run("exact", "--k", "2", "--t", "3", "--r", "1", "--n", "4") == (0, "5\n")
    assert run("exact", "--k", "2", "--t", "3", "--r", "1", "--n", "0") == (0, "0\n")


def test_exact_is_reproducible_cold_and_cached(tmp_path):
    args = ("exact", "--k", "3", "--t", "4", "--r", "1", "--n", "100")
    cold = run(*args)
    first = run(*args, cache=tmp_path)
    warm = run(*args, cache=tmp_path)
    assert cold == first == warm == (0, "74980135\n")
    assert (tmp_path / "pkx_k3_n100.bin").exists()


def test_cache_reuses_larger_table(tmp_path):
    run("exact", "--k", "3", "--t", "4", "--r", "1", "--n", "200", cache=tmp_path)
    run("exact", "--k", "3", "--t", "4", "--r", "2", "--n", "50", cache=tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["pkx_k3_n200.bin"]


def test_qtable_printed_column():
    code, text = run("qtable", "--k", "3", "--t", "4", "--r", "1", "--n-list", "10,100,1000")
    lines = text.splitlines()
    assert code == 0 and lines[0] == "n,exact,estimate,Q"
    q = [line.split(",")[3] for line in lines[1:]]
    printed = ["0.95865", "0.98376", "0.99054"]
    assert all(abs(float(a) - float(b)) <= 1.01e-5 for a, b in zip(q, printed))


def test_qtable_single_row_and_methods_agree():
    dp = run("qtable", "--k", "4", "--t", "5", "--r", "2", "--n-list", "10")
    pent = run("qtable", "--k", "4", "--t", "5", "--r", "2", "--n-list", "10", "--method", "pentagonal")
    assert dp == pent
    assert dp[1].splitlines()[1].endswith(",0.93232")


def test_qtable_output_is_byte_stable():
    args = ("qtable", "--k", "3", "--t", "4", "--r", "2", "--n-list", "10,50")
    assert run(*args) == run(*args)


def test_ordering_and_orderings():
    assert run("ordering", "--k", "12", "--t", "7") == (0, "1 2 3 4 6 5 7\n")
    code, text = run("orderings", "--t", "7")
    assert code == 0 and len(text.splitlines()) == 7
    code, text = run("orderings", "--t", "7", "--format", "json")
    assert len(json.loads(text)) == 7


def test_ocount_ratios():
    code, text = run("ocount", "--t-min", "3", "--t-max", "10")
    lines = text.splitlines()
    assert code == 0 and lines[0] == "t,O_t,phi_t,ratio"
    assert lines[5] == "7,7,6,1.16667"
    assert all(float(line.split(",")[3]) >= 0.5 for line in lines[1:])


def test_ocount_threads_match():
    assert run("ocount", "--t-min", "3", "--t-max", "9") == run("--threads", "2", "ocount", "--t-min", "3", "--t-max", "9")


def test_verify_exit_codes():
    code, text = run("verify", "--suite", "figure-3", "--t", "7")
    assert code == 0 and json.loads(text)["passed"]
    code, text = run("verify", "--suite", "exact-oracle", "--param", "n_max=12")
    assert code == 0
    code, text = run("verify", "--suite", "major-arc", "--param", "triples=[[4,5,3]]", "--param", "j_max=6")
    assert code == 1 and not json.loads(text)["passed"]


def test_usage_errors():
    assert run("verify", "--suite", "nope")[0] == 2
    assert run("--prec", "20", "exact", "--k", "2", "--t", "3", "--r", "1", "--n", "4")[0] == 2
    assert run("exact", "--k", "1", "--t", "3", "--r", "1", "--n", "4")[0] == 2
    assert run("ordering", "--k", "2", "--t", "4")[0] == 2
    assert run("verify", "--suite", "bijection", "--param", "bogus=1")[0] == 2


def test_capacity_exit_code():
    assert run("--n-cap", "10", "exact", "--k", "2", "--t", "3", "--r", "1", "--n", "40")[0] == 3


def test_precision_env_and_flag(monkeypatch):
    monkeypatch.setenv("KINDIV_PREC", "20")
    assert run("ordering", "--k", "12", "--t", "7")[0] == 2
    assert run("--prec", "128", "ordering", "--k", "12", "--t", "7")[0] == 0


def test_digamma_and_bias_commands():
    code, text = run("digamma", "--x", "1")
    assert code == 0 and "-0.5772156649015328606" in text
    code, text = run("bias", "--k", "3", "--t", "4")
    assert code == 0 and text.splitlines()[0] == "r,rbar,psi_kt"


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "kindiv.cli", "--no-cache", "ordering", "--k", "2", "--t", "7"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1 3 5 7 2 4 6\n"


def test_corrupt_cache_file_is_rebuilt(tmp_path):
    (tmp_path / "pkx_k2_n10.bin").write_bytes(b"KIXT garbage")
    assert run("exact", "--k", "2", "--t", "3", "--r", "1", "--n", "4", cache=tmp_path) == (0, "5\n")
