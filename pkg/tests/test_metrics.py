import io
import math

import numpy as np
import pytest

from rawpipe.bayer import ColorImage
from rawpipe.degrade import add_awgn, rng_for
from rawpipe.metrics import MetricsReport, psnr, ssim
from rawpipe.synthdata import natural_image


def random_color(h, w, seed, dtype=np.float32):
    return ColorImage(planes=rng_for(seed).random((3, h, w)).astype(dtype))


def psnr_oracle(a, b):
    # naive per-pixel double loop
    acc, n = 0.0, 0
    for c in range(3):
        for y in range(a.shape[1]):
            for x in range(a.shape[2]):
                d = float(a[c, y, x]) - float(b[c, y, x])
                acc += d * d
                n += 1
    mse = acc / n
    return 99.0 if mse == 0 else min(99.0, 10.0 * math.log10(1.0 / mse))


def gaussian_window():
    g = np.exp(-0.5 * (np.arange(-5, 6) / 1.5) ** 2)
    g /= g.sum()
    return np.outer(g, g)


def ssim_oracle(a, b):
    # brute force over all fully-interior 11x11 windows
    win = gaussian_window()
    c1, c2 = 0.01**2, 0.03**2
    scores = []
    for c in range(3):
        x = a[c].astype(np.float64)
        y = b[c].astype(np.float64)
        h, w = x.shape
        vals = []
        for i in range(h - 10):
            for j in range(w - 10):
                px = x[i : i + 11, j : j + 11]
                py = y[i : i + 11, j : j + 11]
                mx = (win * px).sum()
                my = (win * py).sum()
                vx = (win * px * px).sum() - mx * mx
                vy = (win * py * py).sum() - my * my
                cxy = (win * px * py).sum() - mx * my
                vals.append(
                    ((2 * mx * my + c1) * (2 * cxy + c2))
                    / ((mx * mx + my * my + c1) * (vx + vy + c2))
                )
            pass
        scores.append(np.mean(vals))
    return float(np.mean(scores))


class TestPsnr:
    def test_identical_capped(self):
        a = random_color(8, 8, seed=0)
        assert psnr(a, a) == 99.0

    def test_closed_form_20db(self):
        a = ColorImage(planes=np.full((3, 8, 8), 0.5, dtype=np.float64))
        b = ColorImage(planes=np.full((3, 8, 8), 0.6, dtype=np.float64))
        assert abs(psnr(a, b) - 20.0) < 1e-9

    def test_matches_double_loop_oracle(self):
        a = random_color(10, 12, seed=1)
        b = random_color(10, 12, seed=2)
        assert abs(psnr(a, b) - psnr_oracle(a.planes, b.planes)) < 1e-9

    def test_symmetric(self):
        a = random_color(8, 8, seed=3)
        b = random_color(8, 8, seed=4)
        assert psnr(a, b) == psnr(b, a)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            psnr(random_color(8, 8, seed=0), random_color(8, 10, seed=0))

    def test_monotonic_in_noise(self):
        gt = natural_image(64, 64, seed=5)
        values = []
        for sigma in (5.0, 10.0, 20.0, 40.0):
            noisy = ColorImage(
                planes=np.stack(
                    [add_awgn(p, sigma, seed=50 + i) for i, p in enumerate(gt.planes)]
                )
            )
            values.append(psnr(noisy, gt))
        assert all(a > b for a, b in zip(values, values[1:]))


class TestSsim:
    def test_self_is_one(self):
        a = random_color(16, 16, seed=6)
        assert ssim(a, a) == 1.0

    def test_anticorrelated_negative(self):
        board = (np.indices((16, 16)).sum(axis=0) % 2).astype(np.float64)
        a = ColorImage(planes=np.stack([board] * 3))
        b = ColorImage(planes=np.stack([1.0 - board] * 3))
        assert ssim(a, b) < 0.0

    def test_matches_brute_force_oracle(self):
        a = random_color(16, 16, seed=7)
        b = random_color(16, 16, seed=8)
        assert abs(ssim(a, b) - ssim_oracle(a.planes, b.planes)) < 1e-7

    def test_symmetric(self):
        a = random_color(16, 16, seed=9)
        b = random_color(16, 16, seed=10)
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)

    def test_too_small_rejected(self):
        a = random_color(8, 8, seed=0)
        with pytest.raises(ValueError):
            ssim(a, a)

    def test_in_valid_range(self):
        a = natural_image(32, 32, seed=11)
        b = random_color(32, 32, seed=12)
        s = ssim(a, b)
        assert -1.0 <= s <= 1.0


class TestMetricsReport:
    def test_means_and_csv(self):
        rep = MetricsReport(metadata={"sigma": 10.0, "method": "test"})
        rep.add("a.png", 30.0, 0.9)
        rep.add("b.png", 34.0, 0.95)
        assert rep.mean_psnr_db == pytest.approx(32.0)
        assert rep.mean_ssim == pytest.approx(0.925)
        buf = io.StringIO()
        rep.to_csv(buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "name,psnr_db,ssim,method,sigma"
        assert len(lines) == 4  # header + 2 rows + mean
        assert lines[-1].startswith("mean,")
