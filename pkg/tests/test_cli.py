import io

import pytest

from exrec.cli import main


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdin=io.StringIO(stdin), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli")
    code, text, _ = run("synth", "--out", str(out), "--kc-count", "24", "--exercise-count", "240",
                        "--material-count", "24", "--exercises-per-material", "8", "--seed", "7")
    assert code == 0
    paths = dict(line.split("\t") for line in text.splitlines())
    lines = open(paths["cases"]).read().splitlines()
    paths["queries"] = str(out / "queries.tsv")
    with open(paths["queries"], "w") as fh:
        for i, line in enumerate(lines[:5]):
            _, kc, q = line.split("\t")
            fh.write(f"r{i}\t{kc}\t{q}\n")
    return paths


def stores(paths, *extra):
    return ["--graph", paths["graph"], "--corpus", paths["corpus"], "--syllabus", paths["syllabus"],
            "--total-steps", "5000", *extra]


def test_synth_twice_identical(tmp_path):
    for d in ("a", "b"):
        assert run("synth", "--out", str(tmp_path / d), "--kc-count", "24", "--exercise-count", "240",
                   "--material-count", "24", "--exercises-per-material", "8", "--seed", "7")[0] == 0
    for name in ("graph.tsv", "corpus.tsv", "embeddings.tsv", "syllabus.txt", "cases.tsv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_synth_infeasible(tmp_path):
    code, _, err = run("synth", "--out", str(tmp_path), "--exercises-per-material", "10",
                       "--exercise-count", "5")
    assert code == 1 and "InfeasibleConfig" in err


def test_recommend(data):
    code, out, _ = run("recommend", *stores(data), "--queries", data["queries"])
    assert code == 0 and len(out.splitlines()) == 5
    again = run("recommend", *stores(data), "--queries", data["queries"])[1]
    threaded = run("recommend", *stores(data, "--threads", "4"), "--queries", data["queries"])[1]
    assert out == again == threaded
    tg = run("recommend", *stores(data), "--queries", data["queries"], "--modules", "tg")[1]
    for line in tg.splitlines():
        gen, dp, sr = line.split("\t")[2].split("/")
        assert gen == dp == sr


def test_recommend_file_embeddings_match_builtin(data):
    builtin = run("recommend", *stores(data), "--queries", data["queries"])[1]
    table = run("recommend", *stores(data, "--embeddings", data["embeddings"]), "--queries", data["queries"])[1]
    assert builtin == table


def test_exit_codes(data, tmp_path):
    assert run("recommend", "--queries", data["queries"])[0] == 1
    code, _, err = run("recommend", *stores(data, "--alpha", "0"), "--queries", data["queries"])
    assert code == 1 and "InvalidAlpha" in err
    assert run("recommend", "--graph", str(tmp_path / "missing.tsv"), "--modules", "tg",
               "--queries", data["queries"])[0] == 1
    bad = tmp_path / "bad.tsv"
    bad.write_text("r0\tk00\n")
    assert run("recommend", *stores(data), "--queries", str(bad))[0] == 2
    assert run("evaluate", *stores(data), "--cases", data["cases"], "--ns", "0")[0] == 1
    assert run("evaluate", *stores(data), "--cases", data["cases"], "--ns", "x")[0] == 1
    assert run("recommend", *stores(data), "--queries", data["queries"], "--modules", "dp")[0] == 1


def test_evaluate(data):
    args = stores(data, "--total-steps", "3000")
    code, out, _ = run("evaluate", *args, "--cases", data["cases"])
    assert code == 0
    lines = out.splitlines()
    assert [l for l in lines if l.startswith("ablation")] == [
        "ablation\tTG", "ablation\tTG+DP", "ablation\tTG+SR", "ablation\tTG+DP+SR"]
    assert lines[1:7] == [l for l in lines[1:7] if l.split("\t")[0] in (
        "macro_recall@10", "micro_recall@10", "macro_recall@25", "micro_recall@25",
        "macro_recall@100", "micro_recall@100")]
    assert lines[7].startswith("distinct2\t")
    assert run("evaluate", *args, "--cases", data["cases"], "--threads", "3")[1] == out
    one = run("evaluate", *args, "--cases", data["cases"], "--modules", "tg,sr", "--ns", "5")[1]
    assert one.splitlines()[0] == "ablation\tTG+SR" and len(one.splitlines()) == 4


def test_serve(data):
    assert run("serve", *stores(data), stdin="") == (0, "", "")
    queries = open(data["queries"]).read().splitlines()
    batch = run("recommend", *stores(data), "--queries", data["queries"])[1].splitlines()
    stdin = "".join(f"{q}\t10\n" for q in queries[:2]) + "garbage\n" + f"{queries[2]}\t10\n" \
        + "rx\tnope\tq000\t3\n"
    code, out, _ = run("serve", *stores(data), stdin=stdin)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 5
    assert lines[0] == batch[0] and lines[1] == batch[1] and lines[3] == batch[2]
    assert lines[2].startswith("ERR\tgarbage\tMalformedRecord")
    assert lines[4].startswith("ERR\trx\t")
    assert run("serve", *stores(data, "--threads", "4"), stdin=stdin)[1] == out
