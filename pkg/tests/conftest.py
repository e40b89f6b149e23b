from pathlib import Path

import pytest

from featint import formats
from featint.features import FeatureModel

AUDIO = Path(__file__).resolve().parent.parent / "data" / "audio"
AUDIO_FEATURES = ("Compress", "Encrypt", "AddMetadata", "LogIP", "Rank")


@pytest.fixture
def audio_dir():
    return AUDIO


@pytest.fixture
def audio_fm():
    return FeatureModel(AUDIO_FEATURES)


@pytest.fixture
def audio_model():
    return formats.model_from_dict(formats._load_json(AUDIO / "model.json"))


@pytest.fixture
def audio_units():
    return formats.load_corpus(AUDIO / "corpus")


@pytest.fixture
def audio_overlay():
    return formats.load_overlay(AUDIO / "overlay.json")
