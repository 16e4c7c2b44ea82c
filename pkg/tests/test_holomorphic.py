from __future__ import annotations

import numpy as np
import pytest

from kkspectra.core.holomorphic import (
    EllipticCurveBundle,
    bundle_connection,
    dbar_laplacian,
    h0_bound_table,
    h0_dimension,
    landau_levels,
    landau_operator,
    landau_spectrum,
    weitzenbock_check,
)
from kkspectra.core.spectral import Spectrum
from kkspectra.scenarios.landau_k3 import weitzenbock_table
from kkspectra.utils.errors import ModelError


def spectrum(values):
    vals = np.asarray(values, dtype=float)
    return Spectrum(vals, None, "dense", np.zeros_like(vals))


class TestBundle:
    def test_square_torus(self):
        bundle = EllipticCurveBundle(k=3)
        assert bundle.area == pytest.approx(4 * np.pi**2)
        assert bundle.mu == pytest.approx(3 / (2 * np.pi))
        assert bundle.diameter == pytest.approx(np.pi * np.sqrt(2))

    def test_negative_degree_flips_mu(self):
        assert EllipticCurveBundle(k=-2).mu == pytest.approx(-EllipticCurveBundle(k=2).mu)

    def test_grid_too_coarse(self):
        with pytest.raises(ModelError, match="at least 2"):
            bundle_connection(EllipticCurveBundle(), 1)

    def test_operator_shapes(self):
        bundle = EllipticCurveBundle(k=1)
        assert landau_operator(bundle, 8).dimension == 128
        assert dbar_laplacian(bundle, 8).dimension == 128


class TestLandau:
    @pytest.mark.parametrize("k", [1, 2])
    def test_lowest_level(self, k):
        bundle = EllipticCurveBundle(k=k)
        spec = landau_spectrum(bundle, 32)
        mu = bundle.mu
        levels = landau_levels(spec, 0.05 * mu)
        center, mult = levels[0]
        assert center == pytest.approx(mu, rel=0.03)
        # complex line as R²: each complex eigenvalue appears twice
        assert mult == 2 * k
        assert levels[1][0] == pytest.approx(3 * mu, rel=0.05)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_h0_dimension(self, k):
        bundle = EllipticCurveBundle(k=k)
        spec = landau_spectrum(bundle, 16 * k if k > 1 else 32)
        assert h0_dimension(spec, bundle.mu, 0.05 * bundle.mu) == k

    def test_negative_degree_has_no_sections(self):
        bundle = EllipticCurveBundle(k=-1)
        spec = landau_spectrum(bundle, 32)
        assert h0_dimension(spec, bundle.mu, 0.05 * abs(bundle.mu)) == 0

    def test_unresolved_cluster(self):
        with pytest.raises(ModelError, match="unresolved cluster"):
            h0_dimension(spectrum([1.0, 1.0, 1.0]), 1.0, 0.01)

    def test_cluster_without_gap(self):
        with pytest.raises(ModelError, match="unresolved cluster"):
            h0_dimension(spectrum([1.0, 1.0, 1.05]), 1.0, 0.01)

    def test_empty_spectrum(self):
        with pytest.raises(ModelError, match="empty spectrum"):
            h0_dimension(spectrum([]), 1.0, 0.01)

    def test_levels_grouping(self):
        levels = landau_levels(spectrum([3.0, 1.0, 1.01, 3.02, 3.01]), 0.05)
        assert [mult for _, mult in levels] == [2, 3]
        assert levels[0][0] == pytest.approx(1.005)


class TestWeitzenbock:
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_operator_identity_is_exact(self, k):
        report = weitzenbock_check(EllipticCurveBundle(k=k), 12, count=4)
        assert report.operator_defect <= 1e-8

    def test_spectra_agree_on_fine_grid(self):
        report = weitzenbock_check(EllipticCurveBundle(k=1), 32, count=4)
        assert report.spectral_gap <= 0.05
        assert len(report.rough) == len(report.shifted) == 4

    def test_scenario_table_names_each_comparison(self):
        report = weitzenbock_check(EllipticCurveBundle(k=1), 12, count=4)
        header, rows = weitzenbock_table(report, 1e-8, 0.02)
        assert header == ["comparison", "value", "bound", "mode"]
        assert rows[0] == ["operator", report.operator_defect, 1e-8, "exact"]
        assert rows[1] == ["spectral", report.spectral_gap, 0.02, "relative to mu"]



class TestBoundTable:
    def test_rows(self):
        bundles = [EllipticCurveBundle(k=1), EllipticCurveBundle(k=0, holonomy=(np.pi / 2, 0.0))]
        rows = h0_bound_table(bundles, 32)
        assert [r["dim"] for r in rows] == [1, 0]
        assert rows[0]["sup_F"] == pytest.approx(bundles[0].mu, rel=1e-6)
        assert set(rows[0]) == {"k", "area", "diameter", "sup_F", "mu", "dim"}
