import os
from pathlib import Path

# keep every model load on the local cache; tests never touch the network
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

import pytest

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"
MODEL_NAME = "bert-base-uncased"


@pytest.fixture(scope="session")
def model():
    from clozeprobe.model import MaskedModel

    return MaskedModel(MODEL_NAME)


@pytest.fixture(scope="session")
def region_spec():
    from clozeprobe.spec import load_probe_spec

    return load_probe_spec(str(FIXTURES / "region_language_mini" / "probe_spec.json"))
