import numpy as np
import pytest

from rawpipe.bayer import BayerMosaic, ColorImage, PackedMosaic, mosaic_from_color, pack, unpack
from rawpipe.classical import (
    bicubic_upsample_plane,
    blur_plane,
    demosaic_bilinear,
    demosaic_malvar,
    denoise_gaussian,
    denoise_wiener,
    gaussian_kernel,
    sr_bicubic,
)
from rawpipe.degrade import add_awgn, rng_for
from rawpipe.metrics import psnr
from rawpipe.synthdata import natural_image


def reflect(i, n):
    # whole-sample reflection, independent of the implementation's helper
    if n == 1:
        return 0
    period = 2 * n - 2
    m = i % period
    return m if m < n else period - m


def site_channel(y, x):
    return [[0, 1], [1, 2]][y % 2][x % 2]


def bilinear_oracle(plane):
    """Per-pixel neighbor-cohort average: for a missing channel, average the
    8-neighborhood samples whose CFA site matches that channel."""
    h, w = plane.shape
    out = np.zeros((3, h, w))
    for y in range(h):
        for x in range(w):
            for c in range(3):
                if site_channel(y, x) == c:
                    out[c, y, x] = plane[y, x]
                    continue
                acc, n = 0.0, 0
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        if dy == 0 and dx == 0:
                            continue
                        yy, xx = y + dy, x + dx
                        if site_channel(yy, xx) == c:
                            acc += plane[reflect(yy, h), reflect(xx, w)]
                            n += 1
                out[c, y, x] = acc / n
    return out


# Malvar-He-Cutler kernels, re-transcribed for the oracle
MALVAR_G = np.array([
    [0, 0, -1, 0, 0],
    [0, 0, 2, 0, 0],
    [-1, 2, 4, 2, -1],
    [0, 0, 2, 0, 0],
    [0, 0, -1, 0, 0],
], dtype=np.float64) / 8.0
MALVAR_ROW = np.array([
    [0, 0, 0.5, 0, 0],
    [0, -1, 0, -1, 0],
    [-1, 4, 5, 4, -1],
    [0, -1, 0, -1, 0],
    [0, 0, 0.5, 0, 0],
], dtype=np.float64) / 8.0
MALVAR_COL = MALVAR_ROW.T
MALVAR_DIAG = np.array([
    [0, 0, -1.5, 0, 0],
    [0, 2, 0, 2, 0],
    [-1.5, 0, 6, 0, -1.5],
    [0, 2, 0, 2, 0],
    [0, 0, -1.5, 0, 0],
], dtype=np.float64) / 8.0


def conv5_at(plane, y, x, kernel):
    h, w = plane.shape
    acc = 0.0
    for dy in range(-2, 3):
        for dx in range(-2, 3):
            acc += kernel[dy + 2, dx + 2] * plane[reflect(y + dy, h), reflect(x + dx, w)]
    return acc


def malvar_oracle(plane):
    h, w = plane.shape
    out = np.zeros((3, h, w))
    for y in range(h):
        for x in range(w):
            r_row = y % 2 == 0
            r_col = x % 2 == 0
            if r_row and r_col:  # R site
                out[0, y, x] = plane[y, x]
                out[1, y, x] = conv5_at(plane, y, x, MALVAR_G)
                out[2, y, x] = conv5_at(plane, y, x, MALVAR_DIAG)
            elif r_row and not r_col:  # G1: R row, B column
                out[0, y, x] = conv5_at(plane, y, x, MALVAR_ROW)
                out[1, y, x] = plane[y, x]
                out[2, y, x] = conv5_at(plane, y, x, MALVAR_COL)
            elif not r_row and r_col:  # G2: B row, R column
                out[0, y, x] = conv5_at(plane, y, x, MALVAR_COL)
                out[1, y, x] = plane[y, x]
                out[2, y, x] = conv5_at(plane, y, x, MALVAR_ROW)
            else:  # B site
                out[0, y, x] = conv5_at(plane, y, x, MALVAR_DIAG)
                out[1, y, x] = conv5_at(plane, y, x, MALVAR_G)
                out[2, y, x] = plane[y, x]
    return np.clip(out, 0.0, 1.0)


class TestDemosaicBilinear:
    def test_constant_exact(self):
        m = BayerMosaic(plane=np.full((8, 8), np.float32(0.37)))
        out = demosaic_bilinear(m)
        assert (out.planes == np.float32(0.37)).all()

    def test_pure_red_scene(self):
        planes = np.zeros((3, 8, 8), dtype=np.float32)
        planes[0] = 1.0
        m = mosaic_from_color(ColorImage(planes=planes))
        out = demosaic_bilinear(m)
        assert (out.planes[0] == 1.0).all()
        assert (out.planes[1] == 0.0).all()
        assert (out.planes[2] == 0.0).all()

    @pytest.mark.parametrize("size", [6, 8, 10, 16])
    def test_matches_brute_force_oracle(self, size):
        plane = rng_for(size).random((size, size)).astype(np.float32)
        out = demosaic_bilinear(BayerMosaic(plane=plane))
        oracle = bilinear_oracle(plane.astype(np.float64))
        assert np.abs(out.planes.astype(np.float64) - oracle).max() < 1e-6

    def test_native_sites_passed_through(self):
        plane = rng_for(5).random((8, 8)).astype(np.float32)
        out = demosaic_bilinear(BayerMosaic(plane=plane))
        for y in range(8):
            for x in range(8):
                assert out.planes[site_channel(y, x), y, x] == plane[y, x]


class TestDemosaicMalvar:
    def test_constant_exact(self):
        m = BayerMosaic(plane=np.full((8, 8), np.float32(0.42)))
        out = demosaic_malvar(m)
        assert (out.planes == np.float32(0.42)).all()

    def test_unit_dc_gain_kernels(self):
        for k in (MALVAR_G, MALVAR_ROW, MALVAR_COL, MALVAR_DIAG):
            assert abs(k.sum() - 1.0) < 1e-12

    def test_impulse_at_green_site(self):
        # responses around an impulse equal the matching kernel taps
        plane = np.zeros((12, 12), dtype=np.float64)
        plane[5, 6] = 1.0  # G2 site
        out = demosaic_malvar(BayerMosaic(plane=plane))
        oracle = malvar_oracle(plane)
        assert np.abs(out.planes - oracle).max() < 1e-12

    @pytest.mark.parametrize("size", [6, 8, 12, 16])
    def test_matches_brute_force_oracle(self, size):
        plane = rng_for(100 + size).random((size, size)).astype(np.float32)
        out = demosaic_malvar(BayerMosaic(plane=plane))
        oracle = malvar_oracle(plane.astype(np.float64))
        assert np.abs(out.planes.astype(np.float64) - oracle).max() < 1e-6

    def test_beats_bilinear_on_natural_patch(self):
        gt = natural_image(64, 64, seed=21, psf_sigma=0.6)
        m = mosaic_from_color(gt)
        assert psnr(demosaic_malvar(m), gt) > psnr(demosaic_bilinear(m), gt)

    def test_output_clamped(self):
        plane = rng_for(9).random((10, 10)).astype(np.float32)
        out = demosaic_malvar(BayerMosaic(plane=plane))
        assert out.planes.min() >= 0.0 and out.planes.max() <= 1.0


class TestDenoiseGaussian:
    def test_sigma_zero_identity(self):
        img = ColorImage(planes=rng_for(1).random((3, 8, 8)).astype(np.float32))
        out = denoise_gaussian(img, 0.0)
        assert (out.planes == img.planes).all()

    def test_constant_exact(self):
        img = ColorImage(planes=np.full((3, 8, 8), np.float32(0.6)))
        out = denoise_gaussian(img, 1.3)
        assert (out.planes == np.float32(0.6)).all()

    def test_reduces_noise_std(self):
        flat = np.full((64, 64), 0.5, dtype=np.float32)
        noisy = add_awgn(flat, 10.0, seed=2)
        img = ColorImage(planes=np.stack([noisy] * 3))
        out = denoise_gaussian(img, 1.0)
        assert out.planes[0].std() < noisy.std()

    def test_packed_planes_independent(self):
        planes = np.zeros((4, 6, 6), dtype=np.float32)
        planes[0, 3, 3] = 1.0
        out = denoise_gaussian(PackedMosaic(planes=planes), 1.0)
        assert (out.planes[1:] == 0).all()
        assert out.planes[0].sum() == pytest.approx(1.0, abs=1e-6)

    def test_kernel_radius(self):
        assert len(gaussian_kernel(1.0)) == 7  # radius ceil(3*1) = 3
        assert len(gaussian_kernel(0.5)) == 5  # radius ceil(1.5) = 2

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            denoise_gaussian(ColorImage(planes=np.zeros((3, 4, 4))), -0.5)


class TestDenoiseWiener:
    def test_sigma_zero_identity(self):
        img = ColorImage(planes=rng_for(3).random((3, 8, 8)).astype(np.float32))
        out = denoise_wiener(img, 0.0, 0.0)
        assert (out.planes == img.planes).all()

    def test_removes_noise_on_flat(self):
        flat = np.full((64, 64), 0.5, dtype=np.float32)
        sigma_n = 10.0 / 255.0
        noisy = add_awgn(flat, 10.0, seed=8)
        img = ColorImage(planes=np.stack([noisy] * 3))
        out = denoise_wiener(img, sigma_n, 20 * sigma_n)
        before = (noisy.astype(np.float64) - 0.5).std()
        after = (out.planes[0].astype(np.float64) - 0.5).std()
        assert after < 0.35 * before

    def test_preserves_structure_better_than_gaussian(self):
        gt = natural_image(64, 64, seed=31)
        sigma_n = 10.0 / 255.0
        noisy = ColorImage(
            planes=np.stack([add_awgn(p, 10.0, seed=40 + i) for i, p in enumerate(gt.planes)])
        )
        wiener = denoise_wiener(noisy, sigma_n, 20 * sigma_n)
        gauss = denoise_gaussian(noisy, 20 * sigma_n)
        assert psnr(wiener, gt) > psnr(gauss, gt)


class TestSrBicubic:
    def test_factor_one_identity(self):
        img = ColorImage(planes=rng_for(4).random((3, 6, 6)).astype(np.float32))
        out = sr_bicubic(img, 1)
        assert (out.planes == img.planes).all()

    def test_constant_exact(self):
        img = ColorImage(planes=np.full((3, 8, 8), np.float32(0.21)))
        for f in (2, 3):
            out = sr_bicubic(img, f)
            assert (out.planes == np.float32(0.21)).all()
            assert out.planes.shape == (3, 8 * f, 8 * f)

    def test_hand_evaluated_phase_weights(self):
        # Catmull-Rom (a=-0.5) weights at the x2 sampling phases:
        #   even outputs (t=0.75): taps (q-2, q-1, q, q+1)
        #   odd outputs  (t=0.25): taps (q-1, q, q+1, q+2)
        w_even = (-0.0234375, 0.2265625, 0.8671875, -0.0703125)
        w_odd = (-0.0703125, 0.8671875, 0.2265625, -0.0234375)
        row = rng_for(6).random(12)
        up = bicubic_upsample_plane(np.tile(row, (8, 1)), 2)
        for q in range(3, 9):
            even = sum(w * row[q - 2 + i] for i, w in enumerate(w_even))
            odd = sum(w * row[q - 1 + i] for i, w in enumerate(w_odd))
            assert up[4, 2 * q] == pytest.approx(even, abs=1e-12)
            assert up[4, 2 * q + 1] == pytest.approx(odd, abs=1e-12)

    def test_packed_shape_contract(self):
        p = PackedMosaic(planes=rng_for(7).random((4, 8, 8)).astype(np.float32))
        up = sr_bicubic(p, 2)
        assert up.planes.shape == (4, 16, 16)
        m = unpack(up)
        assert m.plane.shape == (32, 32)

    @pytest.mark.parametrize("axis", [0, 1])
    def test_packed_planes_coregistered_on_ramp(self, axis):
        # a linear ramp scene must be reproduced exactly (interior) by the
        # phase-corrected packed upsampling, as the packing of the x2 mosaic
        h = w = 16
        r = np.arange(w if axis else h, dtype=np.float64)
        plane = np.broadcast_to(r, (h, w)) if axis else np.broadcast_to(r[:, None], (h, w))
        img = ColorImage(planes=np.stack([plane] * 3) / 15.0)
        hr = unpack(sr_bicubic(pack(mosaic_from_color(img)), 2))
        coord = (np.arange(2 * (w if axis else h)) + 0.5) / 2 - 0.5
        exp = np.broadcast_to(coord, (2 * h, 2 * w)) if axis else np.broadcast_to(coord[:, None], (2 * h, 2 * w))
        err = np.abs(hr.plane - exp / 15.0)[6:-6, 6:-6].max()
        assert err < 1e-12

    def test_invalid_factor_rejected(self):
        with pytest.raises(ValueError):
            sr_bicubic(ColorImage(planes=np.zeros((3, 4, 4))), 0)


class TestDcPreservation:
    # every operator is identity on constants
    def test_all_operators(self):
        c = np.float32(0.55)
        img = ColorImage(planes=np.full((3, 12, 12), c))
        m = mosaic_from_color(img)
        assert (demosaic_bilinear(m).planes == c).all()
        assert (demosaic_malvar(m).planes == c).all()
        assert (denoise_gaussian(img, 0.9).planes == c).all()
        assert (denoise_wiener(img, 0.04, 0.8).planes == c).all()
        assert (sr_bicubic(img, 2).planes == c).all()
        assert (sr_bicubic(pack(m), 2).planes == c).all()
