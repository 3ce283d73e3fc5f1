"""Data tables behind the boundary and figure commands.

Each builder returns a :class:`FigureTable` of named real-valued columns;
rows that would carry a non-finite value (for example a state that cannot
be certified at all) are left out rather than filled with NaN.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .certification import VacuumPair, certify
from .errors import DomainError, NotCertifiableError
from .gaussian_boundary import (
    approx_delta_threshold,
    boundary_lambda,
    boundary_p0,
    boundary_q0,
    boundary_wg,
)
from .planner import required_runs, rds_min
from .state_models import NoisySinglePhotonModel, eta_threshold, noisy_single_photon_vacuum_pair

FIG3_T = (0.1, 0.25, 0.5, 0.75, 0.9)
FIG4_T = (0.25, 0.5, 0.75)
FIG5_NBAR = (1e-2, 1e-3)
# closest approach to V = 1 in the boundary sweeps, where p0 = q0 = 1 degenerates
V_TOP = 1.0 - 1e-6


@dataclass
class FigureTable:
    columns: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"column lengths differ: {sorted(lengths)}")
        for name, values in self.columns.items():
            values = [float(v) for v in values]
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"non-finite value in column {name!r}")
            self.columns[name] = values

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()), []))

    def rows(self) -> Iterable[tuple]:
        return zip(*self.columns.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows():
            writer.writerow([format(v, ".17g") for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"metadata": self.metadata, "columns": self.columns},
                          sort_keys=False, indent=1) + "\n"

    @classmethod
    def concat(cls, tables: Sequence["FigureTable"], metadata: dict) -> "FigureTable":
        names = list(tables[0].columns)
        merged = {name: [v for t in tables for v in t.columns[name]] for name in names}
        return cls(merged, metadata)


def boundary_table(T: float, v_points: int = 200, v_min: float = 0.05) -> FigureTable:
    """Boundary curve at transmittance ``T`` sampled on a uniform ``V`` grid ending at 1.

    ``Delta`` is the gap to the physical bound ``1 - T(1 - p0)``;
    ``Delta_approx`` is the same gap predicted by the approximate criterion.
    """
    if not 0.0 < T < 1.0:
        raise DomainError(f"transmittance must lie in (0, 1), got {T!r}")
    if v_points < 2:
        raise DomainError("need at least two V points")
    if not 0.0 < v_min < 1.0:
        raise DomainError(f"v_min must lie in (0, 1), got {v_min!r}")
    V = np.linspace(v_min, 1.0, v_points)
    p0 = boundary_p0(V, T)
    q0 = boundary_q0(V, T)
    delta = np.maximum(1.0 - T * (1.0 - p0) - q0, 0.0)
    return FigureTable(
        {
            "V": V,
            "p0": p0,
            "q0": q0,
            "lambda": boundary_lambda(V, T),
            "W_G": boundary_wg(V, T),
            "Delta": delta,
            "Delta_approx": approx_delta_threshold(p0, T),
        },
        {"figure_id": "boundary", "T": T},
    )


def fig2_table(Ts: Sequence[float] = (0.5, 0.25), v_points: int = 200) -> FigureTable:
    parts = []
    for T in Ts:
        t = boundary_table(T, v_points)
        parts.append(FigureTable({"T": [T] * t.n_rows, **t.columns}))
    return FigureTable.concat(parts, {"figure_id": "fig2", "T": list(Ts)})


def fig3_table(Ts: Sequence[float] = FIG3_T, points: int = 40,
               nbar_min: float = 1e-8, nbar_max: float = 1e-1) -> FigureTable:
    """Threshold single-photon fraction against background noise."""
    cols = {"T": [], "nbar": [], "eta_th": []}
    for T in Ts:
        for nbar in np.geomspace(nbar_min, nbar_max, points):
            eta = eta_threshold(float(nbar), T)
            if eta is None:
                continue
            cols["T"].append(T)
            cols["nbar"].append(nbar)
            cols["eta_th"].append(eta)
    return FigureTable(cols, {"figure_id": "fig3", "T": list(Ts), "model": "noisy_single_photon"})


def fig4_table(Ts: Sequence[float] = FIG4_T, points: int = 200, v_min: float = 0.05) -> FigureTable:
    """Lower bound on the two- to one-detector run ratio for boundary states."""
    cols = {"T": [], "V": [], "p0": [], "q0": [], "R_DS_min": []}
    V = np.linspace(v_min, V_TOP, points)
    for T in Ts:
        p0 = boundary_p0(V, T)
        q0 = boundary_q0(V, T)
        for v, p, q in zip(V, p0, q0):
            cols["T"].append(T)
            cols["V"].append(v)
            cols["p0"].append(p)
            cols["q0"].append(q)
            cols["R_DS_min"].append(rds_min(float(p), float(q)))
    return FigureTable(cols, {"figure_id": "fig4", "T": list(Ts), "V_max": V_TOP})


def _plan_row(cols: dict, eta: float, nbar: float, T: float) -> None:
    p0, q0 = noisy_single_photon_vacuum_pair(NoisySinglePhotonModel(eta, nbar), T)
    if p0 <= 0.0:
        return
    pair = VacuumPair(p0, q0, T)
    if not certify(pair).certified:
        return
    try:
        plan = required_runs(pair)
    except NotCertifiableError:
        return
    for key, value in (("nbar", nbar), ("T", T), ("eta", eta), ("N_S", plan.N_S),
                       ("N_D", plan.N_D), ("R_DS", plan.R_DS), ("R_DS_min", plan.R_DS_min)):
        cols[key].append(value)


def fig5_table(sweep: str = "eta", T: float = 0.5, eta: float = 0.1,
               nbars: Sequence[float] = FIG5_NBAR, points: int = 60) -> FigureTable:
    """Runs needed by each scheme, swept over ``eta`` at fixed ``T`` or over ``T`` at fixed ``eta``.

    Rows where the state cannot be certified are omitted.
    """
    cols = {k: [] for k in ("nbar", "T", "eta", "N_S", "N_D", "R_DS", "R_DS_min")}
    if sweep == "eta":
        for nbar in nbars:
            eta_th = eta_threshold(nbar, T)
            if eta_th is None:
                continue
            for e in np.geomspace(min(1.02 * eta_th + 1e-6, 0.98), 0.98, points):
                _plan_row(cols, float(e), nbar, T)
        meta = {"figure_id": "fig5", "sweep": "eta", "T": T, "nbar": list(nbars)}
    elif sweep == "T":
        for nbar in nbars:
            for t in np.linspace(0.02, 0.98, points):
                _plan_row(cols, eta, nbar, float(t))
        meta = {"figure_id": "fig5", "sweep": "T", "eta": eta, "nbar": list(nbars)}
    else:
        raise DomainError(f"sweep must be 'eta' or 'T', got {sweep!r}")
    return FigureTable(cols, meta)
