import io
import json
from fractions import Fraction

import pytest

from cinf.cli import Frontend, _extract_flags, main, parse_command, run_batch
from cinf.errors import ParseError, UnknownName
from cinf.session import Config, Session, load_config
from cinf.smooth_ring import Ideal
from cinf.terms import Const, Exp, Var


def front(**kw):
    return Frontend(stream=io.StringIO(), **kw)


def said(f):
    return f.stream.getvalue()


# ---------------------------------------------------------------------------
# configuration


def test_config_defaults():
    c = Config()
    assert c.depth == 40
    assert c.cell_budget == 10 ** 6
    assert c.schedule == (53, 113, 256)
    assert c.bounds == (Fraction(-2), Fraction(2))
    b = c.budget()
    assert b.max_depth == 40 and b.max_cells == 10 ** 6


def test_config_region_for():
    r = Config().region_for({"b", "a"})
    assert r.names == ("a", "b")
    assert r.bounds[0][1] == Fraction(-2)


def test_load_config_precedence(tmp_path):
    (tmp_path / "cinf.json").write_text(json.dumps(
        {"depth": 7, "cell-budget": 500, "default-region": "[-1,1]"}))
    # file only
    c = load_config(env={}, cwd=str(tmp_path))
    assert c.depth == 7 and c.cell_budget == 500
    assert c.bounds == (Fraction(-1), Fraction(1))
    # environment beats the file
    c = load_config(env={"CINF_DEPTH": "9"}, cwd=str(tmp_path))
    assert c.depth == 9 and c.cell_budget == 500
    # flags beat both
    c = load_config({"depth": 11}, env={"CINF_DEPTH": "9"}, cwd=str(tmp_path))
    assert c.depth == 11


def test_load_config_env_schedule_and_region():
    c = load_config(env={"CINF_PRECISION_SCHEDULE": "53,113",
                         "CINF_DEFAULT_REGION": "[0,1/2]"}, cwd="/nonexistent")
    assert c.schedule == (53, 113)
    assert c.bounds == (Fraction(0), Fraction(1, 2))


def test_load_config_explicit_file(tmp_path):
    p = tmp_path / "other.json"
    p.write_text(json.dumps({"precision-schedule": [53, 113, 256, 300]}))
    c = load_config(env={"CINF_CONFIG": str(p)}, cwd="/nonexistent")
    assert c.schedule == (53, 113, 256, 300)


def test_load_config_rejects_bad_values(tmp_path):
    with pytest.raises(ParseError):
        load_config({"default-region": "[2,1]"}, env={}, cwd="/nonexistent")
    with pytest.raises(ParseError):
        load_config({"precision-schedule": "fast"}, env={}, cwd="/nonexistent")


# ---------------------------------------------------------------------------
# session state


def test_session_define_and_lookup():
    s = Session()
    s.define_term("f", Exp(Var("x")))
    assert s.term("f") == Exp(Var("x"))
    with pytest.raises(UnknownName):
        s.term("g")
    with pytest.raises(UnknownName):
        s.ideal("I")
    with pytest.raises(ParseError):
        s.define_term("not a name", Var("x"))


def test_session_round_trip(tmp_path):
    s = Session()
    s.define_term("f", Exp(Var("x")) - Const(1))
    s.define_ideal("I", Ideal((Var("x"), Var("y") ** 2)))
    s.add_certificate({"v": 1, "kind": "order"})
    path = tmp_path / "session.json"
    s.save(path)
    t = Session.load(path)
    assert t.canonical() == s.canonical()
    assert t.term("f") == s.term("f")
    assert t.ideal("I").generators == s.ideal("I").generators
    # saving the reloaded session is byte-identical
    t.save(tmp_path / "again.json")
    assert (tmp_path / "again.json").read_text() == path.read_text()


def test_session_version_guard():
    with pytest.raises(ParseError):
        Session.from_json({"v": 2})


# ---------------------------------------------------------------------------
# command parsing


def test_extract_flags_single_and_multi():
    rest, flags = _extract_flags(
        "order 0 x + 3 mod 0 --out a.json --depth 12".split())
    assert rest == ["order", "0", "x", "+", "3", "mod", "0"]
    assert flags == {"out": "a.json", "depth": "12"}
    rest, flags = _extract_flags(
        "spec at 0 --term exp(x) - 1".split())
    assert rest == ["spec", "at", "0"]
    assert flags["term"] == "exp(x) - 1"
    _, flags = _extract_flags(
        "localize 0 --invert x --invert exp(x)".split())
    assert flags["invert"] == ["x", "exp(x)"]


def test_extract_flags_errors():
    with pytest.raises(ParseError):
        _extract_flags(["--bogus"])
    with pytest.raises(ParseError):
        _extract_flags(["--out"])


def test_parse_command_classifies():
    verb, tail, flags = parse_command("order 0 x mod 0")
    assert verb == "order" and tail == "0 x mod 0" and flags == {}
    t = parse_command("exp(x + y) - 1")
    assert t == Exp(Var("x") + Var("y")) - Const(1)


# ---------------------------------------------------------------------------
# commands and exit codes


def test_let_ideal_and_name_resolution():
    f = front()
    assert f.execute("let f = exp(x) - 1") == 0
    assert f.execute("ideal I = (x^2 + y^2)") == 0
    assert f.execute("invertible 1 + f^2 mod 0") == 0
    assert "cert1" in said(f)
    assert f.session.term("f") == Exp(Var("x")) - Const(1)


def test_order_counterexample_exits_refuted():
    f = front()
    code = f.execute("order 0 exp(x + y) - 1 mod 0")
    assert code == 1
    assert "x=-1, y=0" in said(f)


def test_order_proved_stores_certificate():
    f = front()
    assert f.execute("order 0 1 + x^2 mod 0 --name pos") == 0
    assert f.session.certificates["pos"]["kind"] == "order"
    assert f.session.certificates["pos"]["v"] == 1


def test_order_witnessed():
    f = front()
    assert f.execute("order 0 exp(x)^2 witness exp(x) mod 0") == 0
    code = f.execute("order 0 x witness exp(x) mod 0")
    assert code == 3  # not an identity: pattern error


def test_unknown_exits_2():
    f = front(config=Config(depth=0))
    assert f.execute("order 0 x + 3 on [-4,4]") == 2
    assert "unknown" in said(f)


def test_parse_error_exits_3():
    f = front()
    assert f.execute("order 0") == 3
    assert f.execute("let 1bad = x") == 3
    assert f.execute("frobnicate x y") == 3  # unknown verb -> term parse fails


def test_unknown_name_exits_3():
    f = front()
    assert f.execute("radical-member x mod J") == 3
    assert "error" in said(f)


def test_bare_term_echoes_normal_form():
    f = front()
    assert f.execute("x + x") == 0
    assert "2*x" in said(f)


def test_radical_member_and_filter():
    f = front()
    assert f.execute("ideal I = (x^2 + y^2)") == 0
    assert f.execute("radical-member y mod I on [-1,1]") == 0
    assert f.execute("radical-member y - 1 mod I on [-1,1]") == 1
    assert f.execute("filter x contains sin(x)") == 0
    assert f.execute("filter x contains exp(x)") == 1


def test_spec_sper_exits():
    f = front()
    assert f.execute("spec at 0 --term sin(x)") == 1    # vanishes: not a unit
    assert f.execute("spec at 0 --term exp(x)") == 0
    assert f.execute("sper at 0 --term exp(x)") == 0
    assert f.execute("sper at 0 --term -exp(x)") == 1
    assert f.execute("sper at x=1/2 --term x") == 0


def test_root_command_artifact(tmp_path):
    out = tmp_path / "root.json"
    f = front()
    code = f.execute(f"root x^3 - 2 --on [1,2] --tol 1/1000 --out {out}")
    assert code == 0
    rec = json.loads(out.read_text())
    assert rec["v"] == 1
    lo = Fraction(rec["enclosure"][0])
    hi = Fraction(rec["enclosure"][1])
    assert lo <= Fraction(12599210498948732, 10 ** 16) <= hi
    assert f.execute("root x^2 + 1 --on [-1,1]") == 3  # no sign change


def test_localize_command():
    f = front()
    assert f.execute("localize 0 --invert 0") == 0         # ring collapses
    assert f.execute("localize 0 --invert x") == 1         # survives
    assert f.execute("ideal I = (x)") == 0
    assert f.execute("localize I --invert x") == 0         # x is 0 mod I
    assert f.execute("localize 0") == 3                    # missing --invert


def test_localize_presentation_file(tmp_path):
    p = tmp_path / "ring.json"
    p.write_text(json.dumps(
        {"v": 1, "variables": ["x"], "generators": ["x"]}))
    f = front()
    assert f.execute(f"localize {p} --invert x") == 0


def test_out_artifact_for_certificates(tmp_path):
    out = tmp_path / "cert.json"
    f = front()
    assert f.execute(f"order 0 1 + x^2 mod 0 --out {out}") == 0
    rec = json.loads(out.read_text())
    assert rec["v"] == 1 and rec["kind"] == "order"
    assert rec["verdict"]["outcome"] == "proved"


def test_save_load_commands(tmp_path):
    path = tmp_path / "s.json"
    f = front()
    f.execute("let f = sin(x)")
    f.execute("ideal I = (x)")
    assert f.execute(f"save {path}") == 0
    g = front()
    assert g.execute(f"load {path}") == 0
    assert g.session.canonical() == f.session.canonical()


def test_run_batch_worst_exit():
    f = front()
    lines = [
        "# a comment",
        "let f = exp(x + y) - 1",
        "order 0 f mod 0",        # refuted: 1
        "invertible 1 + x^2",     # proved: 0
        "",
    ]
    assert run_batch(f, lines) == 1


def test_main_one_shot(capsys):
    code = main(["order", "0", "exp(x + y) - 1", "mod", "0"])
    assert code == 1
    assert "x=-1, y=0" in capsys.readouterr().out


def test_main_reads_flags(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)  # avoid picking up a stray ./cinf.json
    out = tmp_path / "a.json"
    code = main(["--out", str(out), "invertible", "exp(x)", "mod", "0"])
    assert code == 0
    assert json.loads(out.read_text())["kind"] == "inverse"
