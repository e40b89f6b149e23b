import random

import pytest

from featint import pc
from featint.cparse import SourceUnit, configured_calls, parse_corpus
from featint.errors import ParseError
from featint.features import FeatureModel, enumerate_valid

from oracles import CorpusGen, preprocess, single_config_calls

AB = FeatureModel(("A", "B", "C"))


def parse(text, model=AB, allow=()):
    return parse_corpus([SourceUnit("t.c", text)], model, allow)


def test_audio_functions(audio_units, audio_fm):
    ast = parse_corpus(audio_units, audio_fm)
    assert [f.name for f in ast.functions] == ["encrypt", "add_meatadata", "log", "compress", "rank"]
    (site,) = [c for c in ast.by_name["add_meatadata"][0].calls if c.callee == "encrypt"]
    assert str(site.pc) == "AddMetadata && Encrypt"
    assert site.pc.args == (pc.Var("AddMetadata"), pc.Var("Encrypt"))


def test_empty_corpus():
    assert parse_corpus([], AB).functions == ()


def test_else_gives_alternative_definitions():
    ast = parse("#ifdef A\nvoid f(){}\n#else\nvoid f(){}\n#endif\n")
    assert [str(f.pc) for f in ast.by_name["f"]] == ["A", "!A"]


def test_elif_chain_negates_prior_branches():
    text = "void f() {\n#if A\n g();\n#elif B\n h();\n#else\n k();\n#endif\n}\n"
    calls = parse(text).functions[0].calls
    assert [str(c.pc) for c in calls] == ["A", "!A && B", "!A && !B"]
    assert calls[1].pc.args == (pc.parse("!A && B"),)


def test_call_site_pc_is_stack_of_branches():
    text = "#ifdef A\nvoid f() {\n#ifndef B\n#if C || A\n g();\n#endif\n#endif\n}\n#endif\n"
    f = parse(text).functions[0]
    assert f.calls[0].pc.args == (pc.Var("A"), pc.Not(pc.Var("B")), pc.parse("C || A"))
    assert f.calls[0].pc.args[: len(f.pc.args)] == f.pc.args


def test_configured_calls_audio(audio_units, audio_fm):
    ast = parse_corpus(audio_units, audio_fm)
    everything = configured_calls(ast, audio_fm.config(audio_fm.features))
    assert ("add_meatadata", "encrypt") in everything and ("log", "encrypt") in everything
    assert configured_calls(ast, audio_fm.config()) == []
    log_only = [c for c in configured_calls(ast, audio_fm.config({"LogIP"})) if c[1] == "encrypt"]
    assert log_only == []


def test_comments_strings_members_and_keywords_are_not_calls():
    text = (
        'void f() {\n  /* g(); */ // h();\n  puts("k()");\n  if (x) { s->cb(1); o.m(2); }\n'
        "  return sizeof(x);\n}\n"
    )
    assert [c.callee for c in parse(text).functions[0].calls] == ["puts"]


def test_declarations_structs_and_prototypes():
    text = (
        "struct s { int (*cb)(int); };\nint table[] = {1, 2};\nint g(int x);\n"
        "static const char *name = \"x\";\nvoid f(void) { g(1); }\n"
    )
    ast = parse(text)
    assert [f.name for f in ast.functions] == ["f"]


def test_allow_list_guards():
    text = "#ifndef T_H\n#define T_H\n#ifdef A\nvoid f(){ g(); }\n#endif\n#endif\n"
    ast = parse(text, allow={"T_H"})
    assert pc.evaluate(ast.functions[0].pc, {"A": True})
    with pytest.raises(ParseError, match="T_H"):
        parse(text)


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("#ifdef A\nvoid f(){}\n", 1, "unterminated"),
        ("void f(){}\n#endif\n", 2, "without matching"),
        ("#ifdef Z\n#endif\n", 1, "undeclared feature 'Z'"),
        ("void f() {\n#ifdef A\n}\n#endif\n", 3, "crosses"),
        ("#ifdef A\nvoid f() {\n#else\nvoid g() {\n#endif\n}\n", 3, "balance"),
        ("int x = g(1);\n", 1, "outside any function"),
        ("void f() { @ }\n", 1, "outside the C-lite grammar"),
        ("void f() {\n", 1, "end of file"),
        ("}\n", 1, "unmatched"),
        ("#if A\n#else\n#else\n#endif\n", 3, "after #else"),
        ("#if A &&\n#endif\n", 1, "bad #if"),
        ("#frobnicate\n", 1, "unsupported directive"),
        ("int\n#ifdef A\nx;\n#endif\n", 2, "inside a top-level declaration"),
    ],
)
def test_errors_carry_location(text, line, message):
    with pytest.raises(ParseError, match=message) as err:
        parse(text)
    assert err.value.path == "t.c" and err.value.line == line


def test_overlapping_duplicate_definitions_rejected():
    with pytest.raises(ParseError, match="not mutually exclusive"):
        parse("#ifdef A\nvoid f(){}\n#endif\n#ifdef B\nvoid f(){}\n#endif\n")


def test_deterministic(audio_units, audio_fm):
    assert parse_corpus(audio_units, audio_fm) == parse_corpus(audio_units, audio_fm)


def test_line_continuation_and_directive_comments():
    text = "#if A && \\\n    B /* both */\nvoid f() { g(); }\n#endif\n"
    assert str(parse(text).functions[0].pc) == "A && B"


@pytest.mark.parametrize("seed", range(25))
def test_variability_aware_matches_preprocessing(seed):
    rng = random.Random(seed)
    features = tuple(f"F{i}" for i in range(rng.randint(1, 6)))
    files = CorpusGen(rng, features).corpus(2)
    model = FeatureModel(features)
    ast = parse_corpus([SourceUnit(p, t) for p, t in files], model)
    for config in enumerate_valid(model):
        enabled = config.enabled
        expected = [c for _, t in files for c in single_config_calls(preprocess(t, enabled))]
        assert configured_calls(ast, config) == expected, (seed, sorted(enabled))


@pytest.mark.parametrize("cond, expected", [
    ("#ifdef DBG", "1"),
    ("#ifndef DBG", "1"),
    ("#if defined(DBG) && A", "A"),
    ("#if !DBG || A", "A"),
    ("#if !(DBG && A)", "!A"),
])
def test_allow_listed_macros_are_erased(cond, expected):
    ast = parse(f"{cond}\nvoid f(){{}}\n#endif\n", allow={"DBG"})
    assert str(ast.functions[0].pc) == expected
