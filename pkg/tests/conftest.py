import json
import sys
from importlib.resources import files
from pathlib import Path

import pytest

from fmcheck.dsl import parse_model
from fmcheck.logic import encode_model
from fmcheck.model import Configuration

sys.path.insert(0, str(Path(__file__).resolve().parent))

REPO_ROOT = Path(__file__).resolve().parent.parent
MODELS_DIR = REPO_ROOT / "models"
CONFIGS_DIR = MODELS_DIR / "configs"
SCHEMA_DIR = files("fmcheck") / "schemas"


def validate_payload(schema_name: str, payload) -> None:
    """Validate a JSON payload against one of the shipped schemas."""
    from jsonschema import Draft202012Validator
    from referencing import Registry, Resource

    resources = []
    for entry in SCHEMA_DIR.iterdir():
        if entry.name.endswith(".schema.json"):
            contents = json.loads(entry.read_text())
            resource = Resource.from_contents(contents)
            resources.append((contents["$id"], resource))
    registry = Registry().with_resources(resources)
    schema = json.loads((SCHEMA_DIR / schema_name).read_text())
    Draft202012Validator(schema, registry=registry).validate(payload)

# The three worked selections over the partial CAD graph: a valid product, a
# partial selection that propagation completes, and an inconsistent one.
VALID_SELECTED = ("CAD", "v1", "v1.1", "v2", "v2.1", "v2.3", "v2.3.1", "v2.4", "v3", "v3.2")
PARTIAL_SELECTED = ("v1", "v2", "v2.1", "v2.3", "v2.3.1", "v2.4", "v3")
CONFLICT_SELECTED = ("v1", "v1.2", "v2", "v2.3", "v2.3.1", "v3", "v3.1")


def load_corpus_model(stem: str):
    return parse_model((MODELS_DIR / f"{stem}.fm").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def cad_partial():
    return load_corpus_model("cad_partial")


@pytest.fixture(scope="session")
def cad_encoded(cad_partial):
    return encode_model(cad_partial)


@pytest.fixture(scope="session")
def dead_feature_encoded():
    return encode_model(load_corpus_model("dead_feature"))


@pytest.fixture(scope="session")
def void_encoded():
    return encode_model(load_corpus_model("void"))


@pytest.fixture(scope="session")
def cad_full_encoded():
    return encode_model(load_corpus_model("cad_full"))


@pytest.fixture
def valid_product_config(cad_partial):
    return Configuration.from_signs(
        selected=VALID_SELECTED,
        deselected=[f for f in cad_partial.feature_ids if f not in VALID_SELECTED])


@pytest.fixture
def partial_selection_config():
    return Configuration.from_signs(selected=PARTIAL_SELECTED)


@pytest.fixture
def conflicting_selection_config():
    return Configuration.from_signs(selected=CONFLICT_SELECTED)
