import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np
import orjson
import yaml
from thefuzz import process

from models.errors import InvalidModelError, ToolkitError, ToolkitIOError
from models.goldenrule import Channel, DecayChannelSet, DecayModel, FormFactor, FormShape
from models.openquantum import DensityMatrix, LiouvillianGenerator
from models.resonance import ResonanceParameters
from models.scattering import ModelKind, SMatrixModel
from models.spectral import EnergyWavefunction, Support

__all__ = (
    "ModelCache",
    "choose",
    "parse_complex",
    "parse_scattering",
    "parse_resonance",
    "parse_wavefunction",
    "parse_decay",
    "parse_generator",
    "echo_generator",
)

log = logging.getLogger("Cache")

YAML_SUFFIXES = (".yaml", ".yml")


def choose(value: Any, choices: list[str], field: str) -> str:
    """Return `value` if it is a known choice, otherwise fail with the closest match."""
    if value in choices:
        return value
    suggestion = process.extractOne(str(value), choices)
    hint = f"; did you mean `{suggestion[0]}`?" if suggestion else ""
    raise InvalidModelError(f"Unknown {field} `{value}`{hint}", choices=", ".join(choices))


def _require(doc: dict, key: str, where: str) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise InvalidModelError(f"Missing `{key}` in {where} document")
    return doc[key]


def parse_complex(value: Any) -> complex:
    """Accept `x`, `[re, im]` or `{"re": .., "im": ..}`."""
    try:
        if isinstance(value, dict):
            return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
        if isinstance(value, (list, tuple)):
            re, im = value
            return complex(float(re), float(im))
        return complex(float(value))
    except (TypeError, ValueError) as e:
        raise InvalidModelError("Invalid complex number", value=value) from e


def _parse_matrix(value: Any, dim: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise InvalidModelError("Matrices are lists of rows")
    matrix = np.array([[parse_complex(v) for v in row] for row in value], dtype=complex)
    if dim is not None and matrix.shape != (dim, dim):
        raise InvalidModelError("Matrix shape does not match `dim`", shape=matrix.shape, dim=dim)
    return matrix


def _echo_matrix(matrix: np.ndarray) -> list[list[list[float]]]:
    return [[[float(v.real), float(v.imag)] for v in row] for row in matrix]


def parse_scattering(doc: dict) -> SMatrixModel:
    kind = choose(_require(doc, "kind", "scattering"), [k.value for k in ModelKind], "model kind")
    if kind == ModelKind.RATIONAL.value:
        return SMatrixModel.rational([parse_complex(p) for p in doc.get("poles", [])])
    return SMatrixModel.delta_shell(float(_require(doc, "g", "delta-shell")), float(_require(doc, "a", "delta-shell")))


def parse_resonance(doc: dict) -> ResonanceParameters:
    data = doc.get("resonance", doc)
    return ResonanceParameters(e_r=_require(data, "er", "resonance"), gamma=_require(data, "gamma", "resonance"))


def parse_wavefunction(doc: dict) -> EnergyWavefunction:
    """A Breit-Wigner state from a `resonance` block, or explicit poles and residues."""
    support = choose(doc.get("support", Support.SEMIBOUNDED.value), [s.value for s in Support], "support")
    if "resonance" in doc:
        return EnergyWavefunction.breit_wigner(parse_resonance(doc), support)
    poles = [parse_complex(p) for p in _require(doc, "poles", "wavefunction")]
    residues = [parse_complex(r) for r in _require(doc, "residues", "wavefunction")]
    return EnergyWavefunction.normalized(poles, residues, str(doc.get("description", "")), support)


def parse_decay(doc: dict) -> DecayModel:
    resonance = parse_resonance({"resonance": _require(doc, "resonance", "decay")})
    channels = [
        Channel(_require(c, "b", "channel"), c.get("weight", 1.0)) for c in _require(doc, "channels", "decay")
    ]
    form = dict(doc.get("form_factor", {}))
    shape = choose(form.pop("shape", FormShape.CONSTANT.value), [s.value for s in FormShape], "form-factor shape")
    unknown = set(form) - {"coupling", "alpha", "cutoff", "multipliers"}
    if unknown:
        raise InvalidModelError("Unknown form-factor fields", fields=", ".join(sorted(unknown)))
    return DecayModel(
        resonance,
        DecayChannelSet(channels, doc.get("threshold", 0.0), bool(doc.get("full_line", False))),
        FormFactor(shape, **form),
    )


def parse_generator(doc: dict) -> tuple[LiouvillianGenerator, DensityMatrix | None]:
    dim = int(_require(doc, "dim", "generator"))
    h = _parse_matrix(_require(doc, "h", "generator"), dim)
    jumps = [
        (_parse_matrix(_require(j, "matrix", "jump"), dim), float(j.get("rate", 1.0))) for j in doc.get("jumps", [])
    ]
    generator = LiouvillianGenerator.from_rates(h, jumps)
    rho0 = DensityMatrix(_parse_matrix(doc["rho0"], dim)) if "rho0" in doc else None
    return generator, rho0


def echo_generator(generator: LiouvillianGenerator, rho0: DensityMatrix | None = None) -> dict:
    data = {
        "dim": generator.dim,
        "h": _echo_matrix(generator.h),
        "jumps": [{"matrix": _echo_matrix(j), "rate": 1.0} for j in generator.jumps],
    }
    if rho0 is not None:
        data["rho0"] = _echo_matrix(rho0.entries)
    return data


class ModelCache:
    """Parsed model documents keyed by resolved path, with the raw document kept for provenance."""

    def __init__(self) -> None:
        self.documents: dict[Path, dict] = {}
        """A dictionary of path -> raw document"""
        self.models: dict[tuple[str, Path], Any] = {}
        """A dictionary of (kind, path) -> parsed model"""

    @property
    def total_models(self) -> int:
        return len(self.models)

    def load_document(self, path: str | Path) -> dict:
        path = Path(path).resolve()
        if path in self.documents:
            return self.documents[path]
        try:
            raw = path.read_bytes()
        except OSError as e:
            raise ToolkitIOError(f"Cannot read model file {path}", error=e.strerror) from e
        try:
            doc = yaml.safe_load(raw) if path.suffix.lower() in YAML_SUFFIXES else orjson.loads(raw)
        except (orjson.JSONDecodeError, yaml.YAMLError) as e:
            raise ToolkitIOError(f"Cannot parse model file {path}", error=str(e)) from e
        if not isinstance(doc, dict):
            raise InvalidModelError(f"Model file {path} must hold a mapping")
        self.documents[path] = doc
        log.debug(f"Cached document: {path}")
        return doc

    def _get(self, kind: str, path: str | Path, parser: Callable[[dict], Any]) -> Any:
        key = (kind, Path(path).resolve())
        if key not in self.models:
            doc = self.load_document(path)
            try:
                self.models[key] = parser(doc)
            except ToolkitError:
                raise
            except (TypeError, ValueError, AttributeError) as e:
                raise InvalidModelError(f"Malformed {kind} document {path}", error=str(e)) from e
            log.debug(f"Cached {kind} model: {path}")
        return self.models[key]

    def get_scattering(self, path: str | Path) -> SMatrixModel:
        return self._get("scattering", path, parse_scattering)

    def get_resonance(self, path: str | Path) -> ResonanceParameters:
        return self._get("resonance", path, parse_resonance)

    def get_wavefunction(self, path: str | Path) -> EnergyWavefunction:
        return self._get("wavefunction", path, parse_wavefunction)

    def get_decay(self, path: str | Path) -> DecayModel:
        return self._get("decay", path, parse_decay)

    def get_generator(self, path: str | Path) -> tuple[LiouvillianGenerator, DensityMatrix | None]:
        return self._get("generator", path, parse_generator)
