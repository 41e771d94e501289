"""Manifest files: the hand-off between activation exporters and ``profile``.

An exporter writes one NPY per checkpoint (rows in the same order for every
layer) and a manifest listing them:

    {"schema_version": 1, "network_name": ..., "total_layers": ...,
     "checkpoints": [{"name", "order_index", "d_embed", "matrix_path", "category"?}]}
"""

import json
from importlib import resources
from pathlib import Path

import numpy as np

from . import _intdim


def load_schema():
    """The manifest JSON Schema shipped with the package."""
    return json.loads(resources.files(__package__).joinpath("manifest.schema.json").read_text())


def validate_manifest(doc):
    """Raise if `doc` (dict or JSON text) is not a manifest ``profile`` accepts.

    Checks the JSON Schema when ``jsonschema`` is installed, then the rules
    a schema cannot express (order_index range and ordering) via the C++ reader.
    """
    text = doc if isinstance(doc, str) else json.dumps(doc)
    try:
        import jsonschema
    except ImportError:
        pass
    else:
        jsonschema.validate(json.loads(text), load_schema())
    _intdim.normalize_manifest(text)


def write_manifest(out_dir, network_name, total_layers, layers):
    """Write activations and their manifest into `out_dir`.

    `layers` is a sequence of dicts {name, order_index, activations, category?}
    in checkpoint order; activations are 2-D arrays with identical row order.
    Matrices are stored as float32 NPY v1.0 next to the manifest and referenced
    by relative path. Returns the manifest path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = None
    checkpoints = []
    for i, layer in enumerate(layers):
        a = np.ascontiguousarray(np.asarray(layer["activations"]).reshape(len(layer["activations"]), -1),
                                 dtype=np.float32)
        if rows is not None and a.shape[0] != rows:
            raise _intdim.ValidationError(f"layer {layer['name']!r} has {a.shape[0]} rows, expected {rows}")
        rows = a.shape[0]
        stem = f"{i:03d}_{layer['name']}" + (f"_{layer['category']}" if layer.get("category") else "")
        np.save(out_dir / f"{stem}.npy", a)
        entry = {"name": layer["name"], "order_index": int(layer["order_index"]), "d_embed": int(a.shape[1]),
                 "matrix_path": f"{stem}.npy"}
        if layer.get("category"):
            entry["category"] = layer["category"]
        checkpoints.append(entry)
    doc = {"schema_version": _intdim.SCHEMA_VERSION, "network_name": network_name,
           "total_layers": int(total_layers), "checkpoints": checkpoints}
    validate_manifest(doc)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path
