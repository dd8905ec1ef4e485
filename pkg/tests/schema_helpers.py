import json
from importlib import resources

import jsonschema


def schema(name: str) -> dict:
    return json.loads(resources.files("ezk").joinpath(f"data/{name}.schema.json").read_text())


def validate(obj, name: str) -> None:
    s = schema(name)
    jsonschema.Draft202012Validator.check_schema(s)
    jsonschema.validate(obj, s, cls=jsonschema.Draft202012Validator)
