"""Ricci blocks of Kaluza–Klein metrics against finite differences of
closed-form charts, and the lattice Ricci path on torus grids."""

from __future__ import annotations

from typing import Any

import numpy as np

from kkspectra.core.bundle import (
    Chart,
    bianchi_defect,
    chart_ricci_frame,
    connection_from_flux,
    connection_from_gauge_field,
    covariant_derivative_F,
    euclidean_chart,
    heisenberg_chart,
    plaquette_curvature,
    ricci_blocks_at,
    ricci_h,
    sine_chart,
    sphere_chart,
    su2_fiber_chart,
    torus_grid,
    trivial_connection,
)
from kkspectra.core.group_rep import levi_civita, su2_group, u1_group
from kkspectra.scenarios.result import POSITIVE, ScenarioResult, params_schema

NAME = "ricci-crosscheck"
TAGS = ("curvature",)
DOC = "Ricci blocks vs finite-difference Ricci on Heisenberg, sine-warped and SU(2) charts"
DEFAULTS: dict[str, Any] = {
    "strengths": [0.5, 1.0, 2.0],
    "step": 1e-3,
    "fd_tol": 1e-5,
    "block_tol": 1e-6,
    "grid": 64,
    "lattice_tol": 5e-3,
    "grid3": 12,
}
PARAMS_SCHEMA = params_schema(
    {
        "strengths": {"type": "array", "items": POSITIVE, "minItems": 1},
        "step": POSITIVE,
        "fd_tol": POSITIVE,
        "block_tol": POSITIVE,
        "grid": {"type": "integer", "minimum": 8},
        "lattice_tol": POSITIVE,
        "grid3": {"type": "integer", "minimum": 4},
    }
)


def _full(hh: Any, hv: Any, vv: Any) -> Any:
    return np.block([[hh, hv], [hv.T, vv]])


def _compare(
    result: ScenarioResult,
    rows: list[list[Any]],
    chart: Chart,
    model: Any,
    tol: float,
    step: float,
) -> None:
    fd = chart_ricci_frame(chart, step)
    diff = float(np.max(np.abs(fd - model)))
    rows.append([chart.name, diff])
    result.check(f"fd[{chart.name}]", diff, tol)


def run(params: dict[str, Any], seed: int) -> ScenarioResult:
    step = params["step"]
    result = ScenarioResult()
    rows: list[list[Any]] = []
    no_c = np.zeros((1, 1, 1))
    sigma1 = np.eye(1)

    for b in params["strengths"]:
        F = np.zeros((2, 2, 1))
        F[0, 1, 0], F[1, 0, 0] = -b, b
        hh, hv, vv = ricci_blocks_at(F, np.zeros((2, 1)), sigma1, no_c)
        _compare(result, rows, heisenberg_chart(b), _full(hh, hv, vv), params["fd_tol"], step)
        hh_eig = np.linalg.eigvalsh(hh)
        result.check(f"hh[{b}]", float(np.max(np.abs(hh_eig + b * b / 2))), params["block_tol"])
        result.check(f"vv[{b}]", float(abs(vv[0, 0] - b * b / 2)), params["block_tol"])

        sine = sine_chart(b)
        x = sine.point[0]
        F = np.zeros((2, 2, 1))
        F[0, 1, 0], F[1, 0, 0] = -b * np.cos(x), b * np.cos(x)
        dstar = np.array([[0.0], [-b * np.sin(x)]])
        model = _full(*ricci_blocks_at(F, dstar, sigma1, no_c))
        _compare(result, rows, sine, model, params["fd_tol"], step)

    eps = levi_civita()
    for scale in (1.0, 2.0):
        sigma = scale * np.eye(3)
        _, _, vv = ricci_blocks_at(np.zeros((0, 0, 3)), np.zeros((0, 3)), sigma, eps)
        _compare(result, rows, su2_fiber_chart(sigma), vv, params["fd_tol"], step)
    _compare(result, rows, euclidean_chart(3), np.zeros((3, 3)), params["fd_tol"], step)
    _compare(result, rows, sphere_chart(2.0), np.eye(2) / 4.0, params["fd_tol"], step)

    # lattice paths
    m = params["grid"]
    base = torus_grid([m, m])
    flux = connection_from_flux(base, u1_group(), 1)
    curv = plaquette_curvature(flux)
    f12 = 2 * np.pi / base.volume()
    blocks = ricci_h(base, curv, sigma1, flux.group)
    hh_err = float(np.max(np.abs(blocks.hh + f12**2 / 2 * np.eye(2))))
    result.check("lattice_flux_hh", hh_err, 1e-10)
    result.check("lattice_flux_vv", float(np.max(np.abs(blocks.vv - f12**2 / 2))), 1e-10)

    b = params["strengths"][0]

    def field(points: Any) -> Any:
        out = np.zeros((points.shape[0], 2, 1))
        out[:, 1, 0] = -b * np.sin(points[:, 0])
        return out

    warped = connection_from_gauge_field(base, u1_group(), field)
    curv = plaquette_curvature(warped)
    nabla = covariant_derivative_F(curv)
    blocks = ricci_h(base, curv, sigma1, warped.group, nabla)
    x0 = base.coordinates()[:, 0]
    hv_err = float(np.max(np.abs(blocks.hv[:, 1, 0] + b * np.sin(x0) / 2)))
    result.check("lattice_sine_hv", hv_err, params["lattice_tol"])

    # Bianchi needs three base directions to be nontrivial
    m3 = params["grid3"]
    base3 = torus_grid([m3, m3, m3])

    def field3(points: Any) -> Any:
        out = np.zeros((points.shape[0], 3, 1))
        out[:, 1, 0] = b * np.sin(points[:, 0] + points[:, 2])
        out[:, 2, 0] = b * np.cos(points[:, 0] + points[:, 1])
        return out

    curv3 = plaquette_curvature(connection_from_gauge_field(base3, u1_group(), field3))
    nabla3 = covariant_derivative_F(curv3)
    # the cyclic sum cancels terms of size b, it does not vanish term by term
    result.check("lattice_nabla_F_3d", float(np.max(np.abs(nabla3))), b / 10, at_least=True)
    result.check("lattice_bianchi_3d", bianchi_defect(nabla3), 1e-12)

    su2 = su2_group()
    small = torus_grid([4, 4])
    flat = trivial_connection(small, su2)
    blocks = ricci_h(small, plaquette_curvature(flat), np.eye(3), su2)
    result.check("lattice_su2_vv", float(np.max(np.abs(blocks.vv - np.eye(3) / 2))), 1e-12)
    result.check("lattice_su2_kappa", abs(blocks.kappa), 1e-12)

    result.tables["fd"] = (["chart", "max_diff"], rows)
    header, ricci_rows = ricci_h(small, plaquette_curvature(flat), np.eye(3), su2).rows()
    result.tables["ricci_su2"] = (header, [r for r in ricci_rows if r[0] == 0])
    return result
