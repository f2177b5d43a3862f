import json

import numpy as np
import pytest

from dfq.codec import Tensor
from dfq.errors import FileFormatError, ManifestError, NonFiniteValue
from dfq.tensorio import (ManifestEntry, load_manifest, read_qtns,
                          save_manifest, sha256_file, write_qtns)


def make_tensor(values, name="w", shape=None):
    values = np.asarray(values, dtype=np.float32)
    return Tensor(name, shape or (values.size,), values)


class TestQtns:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(0)
        t = make_tensor(rng.normal(size=300), name="conv1/weight", shape=(10, 30))
        path = tmp_path / "w.qtns"
        write_qtns(path, t)
        back = read_qtns(path)
        assert back.name == t.name
        assert back.shape == t.shape
        assert np.array_equal(back.values.view(np.uint32),
                              t.values.view(np.uint32))

    def test_layout(self, tmp_path):
        t = make_tensor([1.0], name="x")
        path = tmp_path / "x.qtns"
        write_qtns(path, t)
        raw = path.read_bytes()
        assert raw[:4] == b"QTNS"
        assert raw[4] == 1
        hlen = int.from_bytes(raw[5:9], "little")
        header = json.loads(raw[9:9 + hlen])
        assert header == {"dtype": "f32", "name": "x", "shape": [1]}
        assert raw[9 + hlen:] == np.float32(1.0).tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.qtns"
        path.write_bytes(b"XXXX" + bytes(32))
        with pytest.raises(FileFormatError):
            read_qtns(path)

    def test_truncated_data(self, tmp_path):
        t = make_tensor([1.0, 2.0, 3.0])
        path = tmp_path / "t.qtns"
        write_qtns(path, t)
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(FileFormatError):
            read_qtns(path)

    def test_nan_rejected_at_load(self, tmp_path):
        path = tmp_path / "nan.qtns"
        header = json.dumps({"name": "n", "dtype": "f32", "shape": [1]}).encode()
        payload = np.array([np.nan], dtype="<f4").tobytes()
        path.write_bytes(b"QTNS" + bytes([1])
                         + len(header).to_bytes(4, "little") + header + payload)
        with pytest.raises(NonFiniteValue):
            read_qtns(path)

    def test_wrong_dtype_rejected(self, tmp_path):
        path = tmp_path / "f64.qtns"
        header = json.dumps({"name": "n", "dtype": "f64", "shape": [0]}).encode()
        path.write_bytes(b"QTNS" + bytes([1])
                         + len(header).to_bytes(4, "little") + header)
        with pytest.raises(FileFormatError):
            read_qtns(path)


class TestManifest:
    def _write(self, tmp_path, names=("a", "b")):
        entries = []
        for i, name in enumerate(names):
            t = make_tensor(np.arange(4) + i, name=name)
            fname = f"{name}.qtns"
            write_qtns(tmp_path / fname, t)
            entries.append(ManifestEntry(name, t.shape, fname,
                                         sha256_file(tmp_path / fname)))
        path = tmp_path / "manifest.json"
        save_manifest(path, "m", entries)
        return path

    def test_round_trip(self, tmp_path):
        path = self._write(tmp_path)
        m = load_manifest(path)
        assert m.model_name == "m"
        assert [e.name for e in m.tensors] == ["a", "b"]
        t = read_qtns(m.tensor_path(m.tensors[0]))
        assert t.name == "a"

    def test_missing_file(self, tmp_path):
        path = self._write(tmp_path)
        (tmp_path / "a.qtns").unlink()
        with pytest.raises(ManifestError, match="missing"):
            load_manifest(path)

    def test_hash_mismatch(self, tmp_path):
        path = self._write(tmp_path)
        data = bytearray((tmp_path / "a.qtns").read_bytes())
        data[-1] ^= 0xFF
        (tmp_path / "a.qtns").write_bytes(data)
        with pytest.raises(ManifestError, match="sha256"):
            load_manifest(path)

    def test_duplicate_names(self, tmp_path):
        path = self._write(tmp_path)
        doc = json.loads(path.read_text())
        doc["tensors"].append(doc["tensors"][0])
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError, match="duplicate"):
            load_manifest(path, validate=False)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{not json")
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_extra_fields_ignored(self, tmp_path):
        path = self._write(tmp_path, names=("a",))
        doc = json.loads(path.read_text())
        doc["tensors"][0]["tags"] = ["normalization"]
        doc["exporter"] = "test"
        path.write_text(json.dumps(doc))
        m = load_manifest(path)
        assert m.tensors[0].name == "a"
