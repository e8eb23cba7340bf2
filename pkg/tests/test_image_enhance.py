import sys
from importlib import resources
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from softgrip.agent.enhance import (
    EnhanceParams,
    EnhancerHookError,
    GateThresholds,
    Mode,
    enhance,
    equalization_table,
    gamma_table,
    round_half_up,
    run_external_enhancer,
    should_enhance,
    transfer_table,
)
from softgrip.agent.image import Image, ImageFormatError, luminance_stats

FIXTURES = Path(str(resources.files("softgrip.data") / "fixtures"))
fixture_images = sorted(FIXTURES.glob("*.ppm"))
dark_images = [p for p in fixture_images if luminance_stats(Image.load(p)).mean < 60]


def loop_stats(img):
    """Pixel-by-pixel luma statistics, written without numpy vector ops."""
    h, w = img.height, img.width
    values = []
    for yy in range(h):
        for xx in range(w):
            px = img.pixels[yy, xx]
            if img.channels == 1:
                values.append(int(px) * 1000)
            else:
                values.append(299 * int(px[0]) + 587 * int(px[1]) + 114 * int(px[2]))
    mean = sum(values) / (1000 * len(values))
    values.sort()

    def rank(pct):
        k = -(-pct * len(values) // 100)  # ceil
        return values[max(1, k) - 1] / 1000

    return mean, rank(5), rank(95)


@pytest.mark.parametrize("path", fixture_images, ids=lambda p: p.stem)
def test_luminance_matches_pixel_loop(path):
    img = Image.load(path)
    s = luminance_stats(img)
    mean, p5, p95 = loop_stats(img)
    assert s.mean == pytest.approx(mean, abs=1e-12)
    assert (s.p5, s.p95) == pytest.approx((p5, p95), abs=1e-12)


def test_gray_luminance():
    img = Image(np.array([[0, 10], [20, 250]], dtype=np.uint8))
    s = luminance_stats(img)
    assert s.mean == 70.0 and s.p5 == 0.0 and s.p95 == 250.0


def test_gates():
    t = GateThresholds()
    assert should_enhance(luminance_stats(Image.constant(4, 4, 30)), t) is Mode.BRIGHTEN
    assert should_enhance(luminance_stats(Image.constant(4, 4, 230)), t) is Mode.DARKEN
    assert should_enhance(luminance_stats(Image.constant(4, 4, 128)), t) is Mode.NONE
    # the gate edges themselves pass through untouched
    assert should_enhance(luminance_stats(Image.constant(4, 4, 60)), t) is Mode.NONE
    assert should_enhance(luminance_stats(Image.constant(4, 4, 200)), t) is Mode.NONE
    with pytest.raises(ValueError):
        GateThresholds(200, 60)


def test_gamma_half_maps_16_to_64():
    assert gamma_table(0.5)[16] == 64
    assert gamma_table(0.5)[0] == 0 and gamma_table(0.5)[255] == 255


def test_round_half_up():
    assert list(round_half_up(np.array([0.5, 1.5, 2.5, 2.4999]))) == [1, 2, 3, 2]


@pytest.mark.parametrize("gamma", [0.3, 0.5, 1.0, 2.0, 3.5])
def test_gamma_tables_monotone(gamma):
    assert np.all(np.diff(gamma_table(gamma).astype(int)) >= 0)


@settings(max_examples=100)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12))))
def test_transfer_tables_monotone(px):
    img = Image(px)
    assert np.all(np.diff(equalization_table(px).astype(int)) >= 0)
    for mode in Mode:
        table = transfer_table(img, mode).astype(int)
        assert np.all(np.diff(table) >= 0)


@settings(max_examples=100)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12), st.just(3))))
def test_brighten_never_darkens_and_darken_never_brightens(px):
    img = Image(px)
    up = enhance(img, Mode.BRIGHTEN).pixels.astype(int)
    down = enhance(img, Mode.DARKEN).pixels.astype(int)
    assert np.all(up >= px) and np.all(down <= px)


@settings(max_examples=50)
@given(st.integers(0, 255), st.sampled_from(list(Mode)), st.sampled_from([1, 3]))
def test_constant_images_are_fixed_points(value, mode, channels):
    img = Image.constant(7, 5, value, channels)
    assert enhance(img, mode) == img


@pytest.mark.parametrize("path", dark_images, ids=lambda p: p.stem)
def test_brighten_raises_dark_fixture_mean(path):
    img = Image.load(path)
    before = luminance_stats(img).mean
    assert luminance_stats(enhance(img, Mode.BRIGHTEN)).mean > before


def test_at_least_one_low_light_fixture():
    assert dark_images


def test_no_equalization_is_plain_gamma():
    img = Image(np.array([[10, 100], [50, 200]], dtype=np.uint8))
    out = enhance(img, Mode.BRIGHTEN, EnhanceParams(equalize=False))
    assert np.array_equal(out.pixels, gamma_table(0.5)[img.pixels])


def test_pnm_roundtrip_and_comments():
    img = Image(np.arange(24, dtype=np.uint8).reshape(2, 4, 3))
    assert Image.from_bytes(img.to_bytes()) == img
    data = b"P5\n# a comment\n2 1\n255\n\x01\x02"
    assert Image.from_bytes(data).pixels.tolist() == [[1, 2]]


@pytest.mark.parametrize("data", [b"P3\n1 1\n255\n0 0 0", b"P5\n2 2\n255\n\x00", b"P5\n1 1\n65535\n\x00\x00", b"P5"])
def test_bad_pnm(data):
    with pytest.raises(ImageFormatError):
        Image.from_bytes(data)


INVERT = "import sys; d=sys.stdin.buffer.read(); h=d.index(b'255\\n')+4; " \
         "sys.stdout.buffer.write(d[:h] + bytes(255-b for b in d[h:]))"


def test_external_hook_roundtrip():
    img = Image(np.array([[0, 100], [200, 255]], dtype=np.uint8))
    out = run_external_enhancer([sys.executable, "-c", INVERT], img)
    assert out.pixels.tolist() == [[255, 155], [55, 0]]


@pytest.mark.parametrize("code", [
    "import sys; sys.exit(3)",
    "print('not an image')",
    "import sys; sys.stdout.buffer.write(b'P5\\n1 1\\n255\\n\\x00')",
])
def test_external_hook_failures(code):
    img = Image(np.zeros((2, 2), dtype=np.uint8))
    with pytest.raises(EnhancerHookError):
        run_external_enhancer([sys.executable, "-c", code], img)


def test_external_hook_missing_binary():
    with pytest.raises(EnhancerHookError):
        run_external_enhancer(["/nonexistent/enhancer"], Image.constant(2, 2, 5))


@settings(max_examples=200)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12), st.just(3)),
              elements=st.integers(0, 120)))
def test_brighten_raises_mean_when_gamma_moves_a_pixel(px):
    img = Image(px)
    if np.all(px == px.flat[0]) or not np.any(gamma_table(0.5)[px] > px):
        return  # single-value images are fixed points
    assert luminance_stats(enhance(img, Mode.BRIGHTEN)).mean > luminance_stats(img).mean


def test_black_and_white_image_is_left_alone():
    # 0 and 255 are fixed by every gamma and by equalization of two bins
    px = np.zeros((10, 10, 3), dtype=np.uint8)
    px[0, :5] = 255
    img = Image(px)
    assert enhance(img, Mode.BRIGHTEN) == img
