import hashlib

import pytest

from tanplane.classify import Tag
from tanplane.kernel import Fate
from tanplane.render import (
    CSV_HEADER,
    Region,
    default_colormap,
    ppm_bytes,
    read_grid_csv,
    render_dynamic_plane,
    render_parameter_plane,
    write_grid_csv,
    write_ppm,
)

from conftest import SHELL1_LAM

# sha256 of the 64x64 PPM of [-3,3]^2, frozen from a serial run
DEFAULT_VIEW_SHA256 = "ab3dd925806dddbe9a8219eb6bbd533cd8127901526c796aa034a96ef2070f93"


def _key(v):
    return v.tag, v.depth, v.period


def test_pixel_centers_mirror_exactly():
    reg = Region(0j, 6, 4)
    W, H = 10, 7
    for i in range(H):
        for j in range(W):
            assert reg.pixel_center(i, j, W, H) == -reg.pixel_center(H - 1 - i, W - 1 - j, W, H)
    assert reg.pixel_center(3, 0, W, H).imag == 0


def test_region_validation():
    with pytest.raises(ValueError):
        Region(0j, 0, 1)
    with pytest.raises(ValueError):
        render_parameter_plane(Region(0j, 1, 1), 0, 3)


def test_center_pixel_at_zero_is_unresolved():
    r = render_parameter_plane(Region(0j, 2, 2), 3, 3)
    assert r.coord(1, 1) == 0
    assert r.pixels[1][1].tag is Tag.UNRESOLVED


def test_parameter_raster_symmetries():
    W = 24
    r = render_parameter_plane(Region(0j, 6, 6), W, W)
    px = r.pixels
    for i in range(W):
        for j in range(W):
            v = px[i][j]
            for u in (px[W - 1 - i][W - 1 - j], px[W - 1 - i][j], px[W - 1 - j][i]):
                assert _key(u) == _key(v)
                if v.multiplier is not None:
                    assert abs(u.mod_multiplier - v.mod_multiplier) <= 1e-9


def test_parameter_raster_independent_of_threads():
    reg = Region(complex(0.5, 1.0), 3, 2)
    a = render_parameter_plane(reg, 16, 12, threads=1)
    b = render_parameter_plane(reg, 16, 12, threads=3)
    assert ppm_bytes(a) == ppm_bytes(b)


def test_default_view_hash():
    r = render_parameter_plane(Region(0j, 6, 6), 64, 64)
    assert hashlib.sha256(ppm_bytes(r)).hexdigest() == DEFAULT_VIEW_SHA256


def test_supersampled_image():
    r = render_parameter_plane(Region(0j, 6, 6), 8, 8, supersample=True)
    data = ppm_bytes(r)
    assert data.startswith(b"P6\n8 8\n255\n") and len(data) == 11 + 3 * 64
    assert len(r.subpixels[0][0]) == 4


def test_dynamic_raster():
    r = render_dynamic_plane(0.5, Region(0j, 2, 2), 5, 5)
    assert r.pixels[2][2].fate is Fate.TRAP and r.pixels[2][2].step == 0
    d = render_dynamic_plane(SHELL1_LAM, Region(complex(0.86603, -0.86603), 0.01, 0.01), 1, 1)
    assert d.pixels[0][0].fate is Fate.CYCLE and d.pixels[0][0].period == 1
    with pytest.raises(ValueError):
        render_dynamic_plane(0, Region(0j, 1, 1), 2, 2)


def test_dynamic_raster_is_even():
    W = 15
    r = render_dynamic_plane(SHELL1_LAM, Region(0j, 4, 4), W, W)
    for i in range(W):
        for j in range(W):
            a, b = r.pixels[i][j], r.pixels[W - 1 - i][W - 1 - j]
            assert (a.fate, a.step, a.period) == (b.fate, b.step, b.period)


def test_single_pixel_ppm(tmp_path):
    r = render_parameter_plane(Region(0j, 1, 1), 1, 1)
    path = tmp_path / "one.ppm"
    write_ppm(r, path)
    data = path.read_bytes()
    assert data == b"P6\n1 1\n255\n" + bytes(default_colormap(r.pixels[0][0]))
    assert len(data) == 14


def test_csv_round_trip(tmp_path):
    r = render_parameter_plane(Region(complex(1, 1), 2, 2), 4, 3)
    path = tmp_path / "grid.csv"
    write_grid_csv(r, path)
    rows = read_grid_csv(path)
    assert list(rows[0].keys()) == CSV_HEADER
    assert len(rows) == 12
    for row in rows:
        i, j = int(row["i"]), int(row["j"])
        assert complex(float(row["re"]), float(row["im"])) == r.coord(i, j)
        assert row["tag"] == r.pixels[i][j].tag.value


def test_colormap_rejects_unknown():
    with pytest.raises(TypeError):
        default_colormap(3)
