import hashlib
import math

import numpy as np
import pytest
from scipy import ndimage

from qgcnn import data
from qgcnn.data import Dataset, GeneratorConfig, draw_particle, generate, load, pad_to, save
from qgcnn.errors import ConfigError, FormatError, UsageError


def stream(seed=7):
    return np.random.default_rng(seed)


def test_track_is_connected_and_collinear():
    rng = stream()
    for _ in range(50):
        img = draw_particle("track", rng, noise_level=0.0)
        mask = img > 0
        _, ncomp = ndimage.label(mask, structure=np.ones((3, 3)))
        assert ncomp == 1
        pts = np.argwhere(mask).astype(float)
        centred = pts - pts.mean(axis=0)
        _, _, vt = np.linalg.svd(centred, full_matrices=False)
        perp = np.abs(centred @ vt[1])
        assert perp.max() <= 2.0


def test_heavy_track_brighter():
    a, b = stream(3), stream(3)
    track = [draw_particle("track", a) for _ in range(100)]
    heavy = [draw_particle("heavy_track", b) for _ in range(100)]
    mean_nz = lambda imgs: np.mean([im[im > 0].mean() for im in imgs])
    assert mean_nz(heavy) >= 1.5 * mean_nz(track)


def test_kink_bends():
    # the two arms of a kink are far from a single line, unlike a track
    rng = stream(11)
    devs = []
    for _ in range(40):
        pts = np.argwhere(draw_particle("kink", rng) > 0).astype(float)
        centred = pts - pts.mean(axis=0)
        devs.append(np.abs(centred @ np.linalg.svd(centred, full_matrices=False)[2][1]).max())
    assert np.median(devs) > 2.0


def test_generate_deterministic_and_balanced():
    cfg = GeneratorConfig(train_count=20, test_count=6, seed=3)
    tr1, te1 = generate(cfg)
    tr2, te2 = generate(cfg)
    assert tr1.images.tobytes() == tr2.images.tobytes()
    assert te1.labels.tobytes() == te2.labels.tobytes()
    assert tr1.shape == (32, 32)
    assert np.bincount(tr1.labels).tolist() == [10, 10]
    assert tr1.class_names == ("track", "shower")


def test_every_image_nonzero_and_nonnegative():
    for kinds in [("track", "shower"), ("kink", "heavy_track")]:
        tr, te = generate(GeneratorConfig(*kinds, train_count=40, test_count=10, seed=1))
        for ds in (tr, te):
            assert np.all(ds.images >= 0)
            assert np.all(ds.images.reshape(len(ds), -1).max(axis=1) > 0)


def test_train_test_disjoint():
    tr, te = generate(GeneratorConfig(seed=0))
    h = lambda ds: {hashlib.sha256(im.tobytes()).hexdigest() for im in ds.images}
    assert not h(tr) & h(te)


def test_nearest_centroid_separates_track_and_shower():
    tr, te = generate(GeneratorConfig("track", "shower", noise_level=0.1, seed=0))
    x_tr = tr.images.reshape(len(tr), -1)
    x_te = te.images.reshape(len(te), -1)
    cents = np.stack([x_tr[tr.labels == k].mean(axis=0) for k in (0, 1)])
    pred = np.argmin(((x_te[:, None, :] - cents[None]) ** 2).sum(-1), axis=1)
    assert np.mean(pred == te.labels) >= 0.8


@pytest.mark.parametrize("kw", [dict(class_a="track", class_b="track"), dict(train_count=0),
                                dict(test_count=0), dict(class_b="gluon"), dict(noise_level=-1)])
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        generate(GeneratorConfig(**kw))


def test_pad_to(rng):
    img = rng.random((30, 30))
    out = pad_to(img, 32)
    assert out.shape == (32, 32)
    np.testing.assert_array_equal(out[:30, :30], img)
    assert not out[30:, :].any() and not out[:, 30:].any()
    assert math.fsum(out.ravel()) == math.fsum(img.ravel())
    np.testing.assert_array_equal(pad_to(out, 32), out)
    with pytest.raises(UsageError):
        pad_to(np.ones((33, 2)), 32)


def test_save_load_round_trip(tmp_path):
    tr, _ = generate(GeneratorConfig(train_count=12, test_count=2, seed=9))
    path = tmp_path / "d.qgcd"
    save(tr, path)
    back = load(path)
    assert back == tr
    assert back.images.tobytes() == tr.images.tobytes()
    raw = path.read_bytes()
    assert raw[:4] == b"QGCD"
    assert len(raw) == 20 + 12 * (1 + 4 * 32 * 32)
    assert raw[20] == tr.labels[0]
    assert np.frombuffer(raw[21:25], "<f4")[0] == tr.images[0, 0, 0]


def test_empty_dataset(tmp_path):
    path = tmp_path / "e.qgcd"
    save(Dataset(np.zeros((0, 32, 32)), np.zeros(0)), path)
    assert len(path.read_bytes()) == 20
    back = load(path)
    assert len(back) == 0 and back.shape == (32, 32)


def test_format_errors(tmp_path):
    tr, _ = generate(GeneratorConfig(train_count=3, test_count=1, seed=2))
    path = tmp_path / "d.qgcd"
    save(tr, path)
    raw = path.read_bytes()
    path.write_bytes(b"QGCX" + raw[4:])
    with pytest.raises(FormatError, match="offset 0"):
        load(path)
    path.write_bytes(raw[:4] + (2).to_bytes(4, "little") + raw[8:])
    with pytest.raises(FormatError, match="version"):
        load(path)
    path.write_bytes(raw[:-10])
    with pytest.raises(FormatError, match="sample 2 at offset"):
        load(path)
    path.write_bytes(raw[:12])
    with pytest.raises(FormatError, match="header"):
        load(path)


def test_summary_mentions_counts():
    tr, _ = generate(GeneratorConfig(train_count=10, test_count=2))
    text = data.summary(tr)
    assert "5 samples" in text and "track" in text and "shower" in text
