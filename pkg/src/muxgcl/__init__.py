"""Cross-scale graph contrastive learning with topology-informed soft negatives.

The package trains a multi-layer GCN encoder by contrasting final-layer node
embeddings against every layer of a second augmented view, down-weighting
negative pairs whose surrounding topology suggests they are false negatives.
Everything is plain numpy/scipy: forward passes, gradients, the optimizer and
the downstream evaluation are implemented here and checked against
independent oracles in the test suite.

Exports are resolved lazily so the command-line entry point can pin BLAS
thread counts before numpy is first imported.
"""

__version__ = "0.1.0"

_EXPORTS = {
    "GraphDataset": ("muxgcl.datasets", "GraphDataset"),
    "load_dataset": ("muxgcl.datasets", "load_dataset"),
    "save_dataset": ("muxgcl.datasets", "save_dataset"),
    "normalize_adjacency": ("muxgcl.datasets", "normalize_adjacency"),
    "MuxGCL": ("muxgcl.estimator", "MuxGCL"),
    "TrainConfig": ("muxgcl.trainer", "TrainConfig"),
    "train": ("muxgcl.trainer", "train"),
}

__all__ = [*_EXPORTS, "__version__"]


def __getattr__(name):
    try:
        module_name, attr = _EXPORTS[name]
    except KeyError:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    return getattr(importlib.import_module(module_name), attr)
