from pathlib import Path

import numpy as np
import orjson
import pytest

from models.goldenrule import Channel, DecayChannelSet, DecayModel, FormFactor
from models.resonance import ResonanceParameters
from models.scattering import SMatrixModel

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for name in ("GAMOWKIT_QUAD_ORDER", "GAMOWKIT_QUAD_SCALE", "GAMOWKIT_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def narrow() -> ResonanceParameters:
    return ResonanceParameters(e_r=40.0, gamma=1.0)


@pytest.fixture
def rational() -> SMatrixModel:
    return SMatrixModel.rational([complex(2.0, -0.05)])


@pytest.fixture
def delta_shell() -> SMatrixModel:
    return SMatrixModel.delta_shell(20.0, 1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def khalfin_fixture() -> dict:
    return orjson.loads((FIXTURES / "khalfin.json").read_bytes())


def decay_corpus() -> list[DecayModel]:
    """Raw (unnormalized) decay models covering every form-factor shape."""
    single = DecayChannelSet([Channel("b")])
    pair = DecayChannelSet([Channel("pi+pi-", 1.0), Channel("pi0pi0", 3.0)])
    return [
        DecayModel(ResonanceParameters(2.0, 0.1), single, FormFactor("constant")),
        DecayModel(ResonanceParameters(2.0, 0.1), DecayChannelSet([Channel("b")], full_line=True), FormFactor()),
        DecayModel(ResonanceParameters(1.0, 0.05), pair, FormFactor("power-threshold", alpha=0.5)),
        DecayModel(ResonanceParameters(1.0, 0.02), single, FormFactor("lorentz-cutoff", coupling=0.3, cutoff=3.0)),
        DecayModel(
            ResonanceParameters(3.0, 0.2),
            DecayChannelSet([Channel("a", 2.0), Channel("b", 1.0)], threshold=0.5),
            FormFactor("power-threshold", alpha=0.3, multipliers={"a": 0.5}),
        ),
    ]


@pytest.fixture(params=range(len(decay_corpus())), ids=lambda i: f"decay{i}")
def decay_model(request) -> DecayModel:
    return decay_corpus()[request.param].normalized()


@pytest.fixture
def born_order_fixture() -> dict:
    return orjson.loads((FIXTURES / "born_order.json").read_bytes())
