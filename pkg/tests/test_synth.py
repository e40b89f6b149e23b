import pytest

from featint import formats, pc as pcs
from featint.callgraph import build_graph, derive_cf_interactions
from featint.cparse import parse_corpus
from featint.errors import FeatintError
from featint.features import FeatureModel, enumerate_valid
from featint.learner import InfluenceModel, mean_stddev
from featint.synth import CallPlanEntry, SyntheticSpec, generate_corpus, random_spec, simulate_benchmark


def test_audio_spec_corpus_has_planned_interactions(audio_dir):
    spec = formats.load_spec(audio_dir / "spec.json")
    units = generate_corpus(spec)
    assert [u.path for u in units] == [f"{f}.c" for f in spec.fm.features]
    ast = parse_corpus(units, spec.fm)
    ints = derive_cf_interactions(build_graph(ast, spec.fm), spec.fm)
    assert {i.features for i in ints} == {e.features for e in spec.call_plan}
    assert "void encrypt(void)" in units[1].text


@pytest.mark.parametrize("seed", range(10))
def test_random_spec_roundtrip_and_determinism(seed):
    spec = random_spec(6, 3, 2, seed=seed)
    again = formats.spec_from_dict(formats.spec_to_dict(spec))
    assert again == spec
    assert generate_corpus(spec) == generate_corpus(again)
    assert simulate_benchmark(spec, 2).rows == simulate_benchmark(again, 2).rows


def test_noise_free_rows_equal_truth(audio_dir):
    spec = formats.load_spec(audio_dir / "spec.json")
    ms = simulate_benchmark(spec, 2)
    assert len(ms.rows) == 64
    for config, value in ms.rows:
        assert value == spec.truth.predict(config)


def test_noise_level_is_reflected_in_stddev():
    fm = FeatureModel(("A", "B", "C"))
    spec = SyntheticSpec(fm, InfluenceModel(50.0, ((frozenset("A"), 5.0),)), (), 0.1, 11)
    assert 0.05 <= mean_stddev(simulate_benchmark(spec, 30)) <= 0.15


def test_constraints_limit_measured_configurations():
    fm = FeatureModel(("A", "B"), (pcs.parse("A || B"),))
    spec = SyntheticSpec(fm, InfluenceModel(5.0, ()))
    assert len(simulate_benchmark(spec).rows) == len(enumerate_valid(fm)) == 3


@pytest.mark.parametrize("plan, truth_terms", [
    ([CallPlanEntry("A", "B", pcs.parse("A"))], ()),
    ([CallPlanEntry("A", "B", pcs.parse("A && B && !B"))], ()),
    ([CallPlanEntry("A", "Z", pcs.parse("A && Z"))], ()),
    ([], ((frozenset("AB"), 3.0),)),
])
def test_spec_validation(plan, truth_terms):
    fm = FeatureModel(("A", "B"))
    with pytest.raises(FeatintError):
        SyntheticSpec(fm, InfluenceModel(10.0, truth_terms), plan)


def test_reps_must_be_positive(audio_dir):
    with pytest.raises(FeatintError):
        simulate_benchmark(formats.load_spec(audio_dir / "spec.json"), 0)
