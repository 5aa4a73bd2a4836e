"""Patch affinity estimation: topology embeddings pooled over ego-nets.

The resulting pairwise weights down-weight contrastive negatives that are
topologically close to the anchor's receptive field and therefore likely
false negatives.
"""

from .affinity import (
    AffinityTable,
    UnitAffinity,
    default_omega_floor,
    load_patch_embeddings,
    materialize,
    patch_weight,
    pool_patches,
    save_patch_embeddings,
)
from .node2vec import Node2VecConfig, node2vec_embed
from .vgae import VGAEConfig, vgae_embed

__all__ = [
    "AffinityTable",
    "UnitAffinity",
    "Node2VecConfig",
    "VGAEConfig",
    "default_omega_floor",
    "load_patch_embeddings",
    "materialize",
    "node2vec_embed",
    "patch_weight",
    "pool_patches",
    "save_patch_embeddings",
    "vgae_embed",
]
