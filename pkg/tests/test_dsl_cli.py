"""Text format and command-line driver."""

import json
import random

import pytest

from ultrashift import dsl
from ultrashift.cli import main
from ultrashift.corpus import (
    d,
    f,
    graph_a_source,
    graph_d_source,
    graph_d_target,
    registry,
)
from ultrashift.intsets import IndexSet
from ultrashift.points import FinitePoint, PeriodicPoint

GRAPH_D = """
ultragraph G {
  vertices v over N
  edges e over N {
    source v[k]
    range all(v) when k == 0
    range v[0], v[k] when k >= 1
  }
}
"""

GRAPH_H = """
ultragraph H {
  vertices w over Z*
  edges f over Z* {
    source w[k]
    range w[k+1] when k <= -2
    range w[>=1] when k == -1
    range w[k], w[<=-1] when k >= 1
  }
}
"""

GRAPH_A_WITH_MAP = """
ultragraph G {
  vertices w over [0..0]
  edges d over [0..0] { source w[0] range w[0] }
  edges f over >=1 { source w[0] range w[0] }
}

ultragraph H {
  vertices v over [0..0]
  edges e over >=1 { source v[0] range v[0] }
}

map Phi : G -> H {
  class e[j] for j in >=1 {
    pc 1..1 : f[j]
    pc 1..* : rep(d) f[j]
  }
  class tail(auto) { oracle a.C_B }
}

point target of G = inf: (d)*
point w2 of G = fin: d d | auto
"""


def test_parse_graph_d_matches_fixture():
    doc = dsl.parse(GRAPH_D)
    g = doc.graphs["G"]
    ref = graph_d_source()
    assert g.vertex_families == ref.vertex_families
    assert tuple(g.edge_families.values()) == tuple(ref.edge_families.values())


def test_parse_graph_h_matches_fixture():
    doc = dsl.parse(GRAPH_H)
    g = doc.graphs["H"]
    ref = graph_d_target()
    assert tuple(g.edge_families.values()) == tuple(ref.edge_families.values())


def test_parse_map_and_points():
    doc = dsl.parse(GRAPH_A_WITH_MAP, registry())
    phi = doc.maps["Phi"]
    assert phi.symbol_at(PeriodicPoint((d(), d()), (f(3),))).index == 3
    gname, target = doc.points["target"]
    assert gname == "G" and target == PeriodicPoint((), (d(),))
    _, w2 = doc.points["w2"]
    assert isinstance(w2, FinitePoint) and len(w2.path) == 2


def test_non_affine_index_is_rejected():
    bad = GRAPH_D.replace("v[k]", "v[q]", 1)
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse(bad)
    assert "k" in str(err.value)


def test_guards_must_partition():
    bad = GRAPH_D.replace("when k >= 1", "when k >= 2")
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse(bad)
    assert "partition" in str(err.value) or "cover" in str(err.value)


def test_empty_document_parses():
    doc = dsl.parse("")
    assert doc.graphs == {} and doc.maps == {} and doc.points == {}


def test_errors_carry_position_and_hint():
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse("ultragraph G { vertices v over Q }")
    assert err.value.line == 1 and err.value.col > 1
    assert err.value.hint


def test_domain_forms():
    text = """
    ultragraph G {
      vertices a over N
      vertices b over Z
      vertices c over Z*
      vertices dd over [2..5]
      vertices ee over >=1
      vertices ff over <=-3
      edges g over N { source a[k] range all(a) }
    }
    """
    doc = dsl.parse(text)
    g = doc.graphs["G"]
    assert g.vertex_families["a"] == IndexSet.at_least(0)
    assert g.vertex_families["b"] == IndexSet.all()
    assert g.vertex_families["c"] == IndexSet.nonzero()
    assert g.vertex_families["dd"] == IndexSet.between(2, 5)
    assert g.vertex_families["ee"] == IndexSet.at_least(1)
    assert g.vertex_families["ff"] == IndexSet.at_most(-3)


def _random_graph_text(rng: random.Random) -> str:
    # stay inside the printable class: guards clip to single spans
    dom = rng.choice(["N", "Z*", "[0..4]", ">=1"])
    vdom = rng.choice(["N", "Z", "[0..6]"])
    split = rng.choice([None, 1, 2]) if dom != "Z*" else \
        rng.choice([None, -1])
    lines = [
        "ultragraph R {",
        f"  vertices v over {vdom}",
        f"  edges p over {dom} {{",
        "    source v[0]" if vdom != "Z" else "    source v[k]",
    ]
    if split is not None:
        lines.append(f"    range v[0] when k <= {split}")
        lines.append(f"    range v[0], v[1] when k >= {split + 1}")
    else:
        lines.append("    range v[0], v[1]")
    lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def test_parse_print_parse_is_stable_on_generated_documents():
    rng = random.Random(0)
    for i in range(50):
        text = _random_graph_text(rng)
        doc = dsl.parse(text)
        printed = dsl.print_document(doc)
        doc2 = dsl.parse(printed)
        for name, g in doc.graphs.items():
            g2 = doc2.graphs[name]
            assert g2.vertex_families == g.vertex_families, text
            assert tuple(g2.edge_families.values()) == \
                tuple(g.edge_families.values()), text
        assert dsl.print_document(doc2) == printed


def test_fixture_documents_round_trip():
    for g in (graph_a_source(), graph_d_source(), graph_d_target()):
        printed = dsl.print_graph(g)
        doc = dsl.parse(printed)
        g2 = doc.graphs[g.name]
        assert g2.vertex_families == g.vertex_families
        assert tuple(g2.edge_families.values()) == \
            tuple(g.edge_families.values())


# -- CLI --------------------------------------------------------------------------


@pytest.fixture()
def doc_file(tmp_path):
    p = tmp_path / "doc.ug"
    p.write_text(GRAPH_A_WITH_MAP)
    return str(p)


@pytest.fixture()
def h_file(tmp_path):
    p = tmp_path / "h.ug"
    p.write_text(GRAPH_H)
    return str(p)


def test_cli_validate(doc_file, capsys):
    assert main(["validate", doc_file]) == 0
    out = capsys.readouterr().out
    assert "validate(G)" in out and "validate(H)" in out


def test_cli_validate_detects_sinks(tmp_path, capsys):
    p = tmp_path / "sink.ug"
    p.write_text("""
    ultragraph S {
      vertices u over N
      edges g over N { source u[0] range u[0] }
    }
    """)
    assert main(["validate", str(p)]) == 1
    assert "sinks" in capsys.readouterr().out


def test_cli_emitters_lists_both_rays(h_file, capsys):
    assert main(["emitters", h_file, "--graph", "H", "--minimal"]) == 0
    out = capsys.readouterr().out
    assert "{w[<=-1]}" in out and "{w[>=1]}" in out


def test_cli_blocks(doc_file, capsys):
    assert main(["blocks", doc_file, "--graph", "G", "-n", "1",
                 "--index-bound", "2"]) == 0
    out = capsys.readouterr().out
    assert "d[0]" in out and "f[1]" in out and "f[2]" in out


def test_cli_eval_and_exit_codes(doc_file, capsys):
    assert main(["eval", doc_file, "--map", "Phi", "--point",
                 "inf: d d (f[3])*", "--depth", "5"]) == 0
    out = capsys.readouterr().out
    assert "e[3]" in out


def test_cli_check_csc_json(doc_file, capsys):
    assert main(["check", "csc", doc_file, "--map", "Phi",
                 "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == 1
    checks = {r["check"] for r in payload["records"]}
    assert "csc-item-i" in checks
    assert all("bounds" in r for r in payload["records"])


def test_cli_check_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.ug"
    p.write_text(GRAPH_A_WITH_MAP + """
map Bad : G -> H {
  class e[1] { pc 2..2 : d }
  class e[j] for j in >=2 { pc 1..1 : f[j-1] }
  class tail(auto) { oracle a.C_B }
}
""")
    assert main(["check", "csc", str(p), "--map", "Bad"]) == 1
    assert "fails" in capsys.readouterr().out


def test_cli_refute_fd_with_audit(doc_file, capsys):
    code = main(["refute-fd", doc_file, "--oracle", "a.C_B", "--point",
                 "target", "--graph", "G", "--max-window", "4", "--audit"])
    assert code == 0
    out = capsys.readouterr().out
    assert "window witnesses" in out and "audit" in out


def test_cli_converge(doc_file, capsys):
    assert main(["converge", doc_file, "--seq", "a.dn_f1", "--target",
                 "target", "--graph", "G"]) == 0


def test_cli_fixture_run(capsys):
    assert main(["fixture", "run", "a"]) == 0
    out = capsys.readouterr().out
    assert "fixture-a:probe-continuity@all_d" in out


def test_cli_parse_error_exit_code(tmp_path, capsys):
    p = tmp_path / "broken.ug"
    p.write_text("ultragraph { oops }")
    assert main(["validate", str(p)]) == 3
    assert "parse error" in capsys.readouterr().err


def test_cli_usage_error_exit_code():
    assert main(["no-such-command"]) == 3


def test_cli_stdin(monkeypatch, capsys):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(GRAPH_H))
    assert main(["validate", "-"]) == 0


def test_cli_parallel_check(doc_file):
    assert main(["check", "genchl", doc_file, "--map", "Phi",
                 "--parallel"]) == 0


def test_env_bounds_override(doc_file, monkeypatch, capsys):
    monkeypatch.setenv("ULTRASHIFT_DEFAULT_BOUNDS", "samples=10,tries=6")
    assert main(["check", "commute", doc_file, "--map", "Phi"]) == 0
    out = capsys.readouterr().out
    assert "samples=10" in out
