import numpy as np
import pytest

from dfq.codec import Tensor
from dfq.distributions import ModelKind
from dfq.tensorio import ManifestEntry, save_manifest, sha256_file, write_qtns


def synth_layers(n_layers, n, seed, kinds=None):
    """Deterministic synthetic layers: list of (name, kind, loc, scale, values)."""
    rng = np.random.default_rng(seed)
    layers = []
    for i in range(n_layers):
        kind = (kinds[i % len(kinds)] if kinds
                else (ModelKind.GAUSSIAN, ModelKind.LAPLACE)[i % 2])
        loc = float(rng.uniform(-0.05, 0.05))
        scale = float(rng.uniform(0.05, 0.3))
        if kind is ModelKind.GAUSSIAN:
            values = rng.normal(loc, scale, size=n)
        else:
            values = rng.laplace(loc, scale, size=n)
        layers.append((f"layer{i:02d}", kind, loc, scale,
                       values.astype(np.float32)))
    return layers


def write_manifest(dir_path, layers, model_name="fixture"):
    """Write QTNS files plus a manifest for the given synthetic layers."""
    entries = []
    for name, _, _, _, values in layers:
        tensor = Tensor(name, (values.size,), values)
        fname = f"{name}.qtns"
        write_qtns(dir_path / fname, tensor)
        entries.append(ManifestEntry(name, tensor.shape, fname,
                                     sha256_file(dir_path / fname)))
    path = dir_path / "manifest.json"
    save_manifest(path, model_name, entries)
    return path


@pytest.fixture
def small_manifest(tmp_path):
    layers = synth_layers(3, 4096, seed=7)
    return write_manifest(tmp_path, layers), layers


@pytest.fixture(scope="session")
def big_manifest(tmp_path_factory):
    # sized so the tail intervals of an 8-bit quantizer are well sampled
    path = tmp_path_factory.mktemp("bigmanifest")
    layers = synth_layers(3, 262144, seed=7)
    return write_manifest(path, layers), layers
