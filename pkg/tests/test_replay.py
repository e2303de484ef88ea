import pytest

from bielliptic import replay as rp
from bielliptic.errors import ScriptParseError

HEADER1 = """@e1 P P0:2
@e2 Q
@translate P0
@aut neg
"""
HEADER5 = """@e1 P P0:3
@e2 Q
@translate P0
@aut omega
"""


def run(body, header=HEADER1, claim=None):
    text = header + (f"@claim {claim}\n" if claim else "") + body
    return rp.replay_text(text)


@pytest.mark.parametrize("name, cert", [("type1_main", "4*pi(z(P,Q)) = 0"), ("type5_main", "9*pi(z(P,Q)) = 0")])
def test_builtins_pass(name, cert):
    v = rp.replay_derivation(rp.load_script(name))
    assert v.ok, v.reason
    assert v.certificate == cert
    assert len(v.trace) == v.steps_checked


@pytest.mark.parametrize("name", ["type1_main", "type5_main"])
def test_every_single_step_deletion_fails(name):
    text = rp.builtin_text(name)
    mutants = list(rp.deletion_mutants(text))
    assert len(mutants) == len(rp.parse_script(text).steps)
    for deleted, mutated in mutants:
        assert not rp.replay_text(mutated, name).ok, deleted


def test_deleting_step_eq2_fails_at_the_combination():
    text = rp.builtin_text("type1_main")
    mutated = "\n".join(line for line in text.splitlines() if not line.startswith("(eq2)"))
    v = rp.replay_text(mutated)
    assert not v.ok and v.failing_step == "two"


def test_strengthened_claim_is_not_derivable():
    # the universal model has order 2, but the shipped chain cannot prove it: no fake certificates
    text = rp.builtin_text("type1_main").replace("@claim 4*", "@claim 2*").replace(
        "(four) combine(two, tor1, tor2) : 4*", "(four) combine(two, tor1, tor2) : 2*")
    v = rp.replay_text(text)
    assert not v.ok and v.failing_step == "four"


def test_sign_flip_in_a_step_fails():
    text = rp.builtin_text("type5_main").replace("=> pi(s1) + pi(s2) + pi(s3)", "=> pi(s1) - pi(s2) + pi(s3)")
    v = rp.replay_text(text)
    assert not v.ok and v.failing_step == "three"


@pytest.mark.parametrize("m", [2, 3, 6])
def test_composite_reduction_template(m):
    v = rp.replay_derivation(rp.load_script("composite_reduction", degree=m))
    assert v.ok and v.certificate == f"{m}*c = 0"


def test_template_needs_degree(tmp_path):
    path = tmp_path / "t.drv"
    path.write_text(rp.builtin_text("composite_reduction"))
    with pytest.raises(ScriptParseError):
        rp.load_script(str(path))
    assert rp.replay_derivation(rp.load_script(str(path), degree=5)).ok


def test_bilinearity_rule():
    assert run("(a) bilinearity : z(P+P0,Q) => z(P,Q) + z(P0,Q)\n", claim="z(P+P0,Q) => z(P,Q) + z(P0,Q)").ok
    assert run("(a) bilinearity : 2*z(P0,Q) => 0\n", claim="2*z(P0,Q) => 0").ok
    v = run("(a) bilinearity : z(P0,Q) => 0\n", claim="z(P0,Q) => 0")
    assert not v.ok and "tensor" in v.reason
    v = run("(a) bilinearity : [P,Q] => 0\n", claim="[P,Q] => 0")
    assert not v.ok and "special cycles" in v.reason


def test_bilinearity_uses_omega_relation():
    body = "(a) bilinearity : z(P,Q) + z(P,w(Q)) + z(P,w(w(Q))) => 0\n"
    assert run(body, HEADER5, "z(P,Q) + z(P,w(Q)) + z(P,w(w(Q))) => 0").ok


def test_torsion_rule():
    assert run("(a) torsion-equivalence : 2*[P0,Q] => 2*[O,Q]\n", claim="2*[P0,Q] => 2*[O,Q]").ok
    v = run("(a) torsion-equivalence : [P0,Q] => [O,Q]\n", claim="[P0,Q] => [O,Q]")
    assert not v.ok and "multiple of the order" in v.reason
    v = run("(a) torsion-equivalence : 2*[P,Q] => 2*[O,Q]\n", claim="2*[P,Q] => 2*[O,Q]")
    assert not v.ok


def test_functoriality_rule():
    assert run("(a) pushforward-functoriality : pi([P,Q]) => pi([P+P0,-Q])\n", claim="pi([P,Q]) => pi([P+P0,-Q])").ok
    v = run("(a) pushforward-functoriality : pi([P,Q]) => pi([P,-Q])\n", claim="pi([P,Q]) => pi([P,-Q])")
    assert not v.ok and "orbit" in v.reason
    v = run("(a) pushforward-functoriality : [P,Q] => [P+P0,-Q]\n", claim="[P,Q] => [P+P0,-Q]")
    assert not v.ok and "pi" in v.reason


def test_degree_rule_and_modulo_push():
    header = "@class c d\n@degree 3\n"
    assert run("(a) degree-identity : push(pull(c)) + push(pull(d)) => 3*c + 3*d\n", header,
               "push(pull(c)) + push(pull(d)) => 3*c + 3*d").ok
    v = run("(a) degree-identity : push(pull(c)) => 2*c\n", header, "push(pull(c)) => 2*c")
    assert not v.ok
    # without @modulo push the cokernel step is not licensed
    body = "(a) degree-identity : push(pull(c)) => 3*c\n(b) combine(a) : 3*c => 0\n"
    assert not run(body, header, "3*c => 0").ok
    assert run(body, header + "@modulo push\n", "3*c => 0").ok


def test_combine_rule():
    body = ("(a) bilinearity : 2*z(P0,Q) => 0\n"
            "(b) combine(a) : 4*z(P0,Q) => 0\n"
            "(c) combine(a) : z(P0,Q) => 0\n")
    v = run(body, claim="z(P0,Q) => 0")
    assert not v.ok and v.failing_step == "c"
    v = run("(b) combine(zz) : 4*z(P0,Q) => 0\n", claim="4*z(P0,Q) => 0")
    assert not v.ok and "not an earlier step" in v.reason


def test_claim_must_match_exactly():
    body = "(a) bilinearity : 2*z(P0,Q) => 0\n"
    assert not run(body, claim="0 => 2*z(P0,Q)").ok
    assert not run(body).ok  # no claim


@pytest.mark.parametrize(
    "text",
    [
        HEADER1 + "(a) frobnicate : z(P,Q) => 0\n",
        HEADER1 + "(a) bilinearity : z(P,R) => 0\n",
        HEADER1 + "(a) bilinearity : z(P,Q) 0\n",
        HEADER1 + "(a) bilinearity : 3 => 0\n",
        HEADER1 + "@wat 3\n",
        HEADER1 + "(a) bilinearity : w(P) => 0\n",
        HEADER1 + "(a) combine : z(P,Q) => 0\n",
        HEADER1 + "(a) bilinearity(b) : z(P,Q) => 0\n",
        HEADER1 + "(a) bilinearity : z(P,Q) => 0\n(a) bilinearity : z(P,Q) => 0\n",
        HEADER1 + "(a) bilinearity : z(P,Q) => 0 $\n",
        HEADER1 + "let = 3\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ScriptParseError) as info:
        rp.parse_script(text)
    assert str(info.value).startswith("line ")


def test_unknown_builtin_and_missing_file():
    with pytest.raises(ScriptParseError):
        rp.builtin_text("type9_main")
    with pytest.raises(ScriptParseError):
        rp.load_script("/nonexistent/script.drv")


def test_verdict_serializes():
    d = rp.replay_derivation(rp.load_script("type1_main")).as_dict()
    assert d["pass"] is True and d["failing_step"] is None
