"""
Run a parsed scenario end to end: auxiliary functions, entropic records,
witnesses, CSV emission and the invariant/oracle suite behind ``check``.
"""

import logging
import numpy as np

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO

from scipy.integrate import cumulative_trapezoid, quad

from wigdil import InvariantViolation, VanishingG, VanishingGamma
from wigdil.bath import SpectralPreset, discretize
from wigdil.gaussian import (
    SystemInit,
    vacuum_state,
    logdet,
    relative_entropy,
    mutual_information
)
from wigdil.dilation import (
    AuxTrajectory,
    integrate_aux,
    tim_trajectory,
    make_grid,
    assemble_covariance,
    system_state,
    environment_state,
    lyapunov_propagate
)
from wigdil.production import (
    EntropicRecord,
    entropic_record,
    production_rate,
    env_production_rate,
    system_entropy_rate,
    srel_S_vac,
    srel_E_init,
    mutual_information_closed,
    system_entropy,
    mutual_info_rate,
    mutual_info_rate_determinant,
    env_production_rate_printed,
    conservation_check,
    current_integral_S,
    current_integral_E,
    velocity_mismatch
)
from wigdil.ancilla import (
    AncillaConfig,
    ancilla_information,
    ancilla_information_covariance,
    ancilla_rate,
    ancilla_rate_printed,
    ancilla_relation_report,
    RelationReport
)
from wigdil.witnesses import WitnessReport, witness_report, gamma_witness
from wigdil.oracles import time_derivative
from wigdil.functions import imap_ordered
from wigdil.parse_config import (
    Scenario,
    TimBath,
    TimeConfig
)
from wigdil.constants import (
    CSV_COLUMNS,
    DEFAULT_N_POINTS,
    FIG1_T_MAX,
    NORM_TOL,
    SHAPE_OHMIC
)

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-8
CONSERVATION_TOL = 1e-6
FD_TOL = 1e-6
LYAPUNOV_MAX_K = 50
N_SAMPLES = 25

###########
##  RUN  ##
###########

def build_trajectory(s: Scenario) -> AuxTrajectory:
    grid = make_grid(s.time.t_max, s.time.n_points)
    if isinstance(s.bath, TimBath):
        return tim_trajectory(s.bath.kappa, s.time.t_max, grid = grid)
    if isinstance(s.bath, SpectralPreset):
        bath = discretize(s.bath)
        kappa_ref = s.bath.kappa if s.bath.shape != SHAPE_OHMIC else None
    else:
        bath, kappa_ref = s.bath, None
    return integrate_aux(bath, s.time.t_max, rtol = s.integrator.rtol, atol = s.integrator.atol,
                         grid = grid, kappa_ref = kappa_ref)

@dataclass(frozen = True, eq = False)
class ScenarioResult:
    scenario: Scenario
    trajectory: AuxTrajectory
    records: List[EntropicRecord]
    witnesses: WitnessReport
    integrals: Dict[str, np.ndarray] = field(default_factory = dict)

    @property
    def grid(self) -> np.ndarray:
        return self.trajectory.grid

def integrate_columns(records: Sequence[EntropicRecord]) -> Dict[str, np.ndarray]:
    '''Cumulative trapezoids from t = 0 of Π, the environment rate and dI_SE/dt.'''
    t = np.array([r.t for r in records])
    return {f"int_{name}": cumulative_trapezoid([getattr(r, attr) for r in records], t, initial = 0.)
            for name, attr in (("Pi", "Pi"), ("env_rate", "env_rate"), ("dI_SE", "dI_SE_dt"))}

def run_scenario(s: Scenario, threads: int = 1, quiet: bool = True) -> ScenarioResult:
    '''
    Solve the dilation and evaluate one EntropicRecord per grid point.
    Output is ordered by time whatever the number of worker processes.
    '''
    traj = build_trajectory(s)
    init, ancilla = s.system, s.ancilla
    records = imap_ordered(lambda i: entropic_record(init, traj, i, ancilla), range(len(traj.grid)),
                           threads = threads, quiet = quiet, msg = lambda curr, last: f"{curr}/{last} time points")
    logger.debug(f"run_scenario: {len(records)} records, K={traj.K}")
    if len(records) < 3:
        ## too short for the monotonicity witnesses
        witnesses = WitnessReport(*gamma_witness(traj))
    else:
        witnesses = witness_report(traj, records)
    return ScenarioResult(s, traj, records, witnesses, integrate_columns(records))

def fig1_preset(N: float, n_points: int = DEFAULT_N_POINTS, ancilla: bool = True) -> Scenario:
    '''
    Thermal initial state (μ = M = 0) decaying into a TIM bath with κ = 1 up
    to κt = 4, so times and rates come out in units of κ.
    '''
    system = SystemInit(N = N)
    return Scenario(system, TimBath(1.), TimeConfig(FIG1_T_MAX, n_points),
                    ancilla = AncillaConfig.from_occupation(N) if ancilla else None)

##############
##  OUTPUT  ##
##############

def format_value(x) -> str:
    '''17 significant digits; None and NaN print as empty fields.'''
    if x is None: return ''
    x = float(x)
    if np.isnan(x): return ''
    return f"{x:.17g}"

def _scale(*values):
    return max([1.] + [abs(v) for v in values if v is not None and np.isfinite(v)])

def verify_record(r: EntropicRecord, tol: float = IDENTITY_TOL):
    '''
    Raises
    ------
    InvariantViolation
        If the decomposition or flux identity fails at this record
    '''
    scale = _scale(r.Pi, r.env_rate, r.dI_SE_dt, r.dS_WS_dt, r.flux)
    for name, residual in (("decomposition", r.decomposition_residual), ("flux", r.flux_residual)):
        if not abs(residual) <= tol * scale:
            raise InvariantViolation(f"{name} identity at t = {r.t:.17g}", abs(residual) / scale, tol)
    return

def result_rows(result: ScenarioResult) -> List[Dict[str, float]]:
    rows = []
    for i, r in enumerate(result.records):
        verify_record(r)
        row = {"t": r.t, "re_g": np.real(r.g), "im_g": np.imag(r.g), "abs_g2": r.abs_g2, "Gamma": r.Gamma,
               "S_WS": r.S_WS, "S_WE": r.S_WE, "srel_S_vac": r.srel_S_vac, "srel_E_init": r.srel_E_init,
               "I_SE": r.I_SE, "Pi": r.Pi, "env_rate": r.env_rate, "dI_SE_dt": r.dI_SE_dt, "flux": r.flux,
               "n_t": r.n_t, "I_AS": r.I_AS, "dI_AS_dt": r.dI_AS_dt}
        for name, values in result.integrals.items():
            row[name] = values[i]
        rows.append(row)
    return rows

def write_csv(result: ScenarioResult, f: TextIO, columns: Optional[Sequence[str]] = None):
    '''
    Comma-separated table with a header line and '\\n' line endings.
    Rows are re-checked against the decomposition and flux identities as they are written.
    '''
    columns = result.scenario.output.columns if columns is None else tuple(columns)
    columns = [c for c in CSV_COLUMNS if c in columns]
    f.write(','.join(columns) + '\n')
    for row in result_rows(result):
        f.write(','.join(format_value(row[c]) for c in columns) + '\n')
    return

#############
##  CHECK  ##
#############

@dataclass(frozen = True)
class CheckItem:
    name: str
    deviation: Optional[float]
    tolerance: Optional[float] = None
    passed: Optional[bool] = None ## None for diagnostics

    @property
    def status(self) -> str:
        if self.deviation is None: return "skipped"
        if self.passed is None: return "info"
        return "ok" if self.passed else "FAIL"

def _assert_item(name, deviation, tolerance):
    return CheckItem(name, deviation, tolerance, None if deviation is None else bool(deviation <= tolerance))

@dataclass(frozen = True, eq = False)
class CheckReport:
    items: List[CheckItem]
    witnesses: WitnessReport
    relation: Optional[RelationReport] = None
    misaligned: list = field(default_factory = list)

    @property
    def failed(self) -> List[CheckItem]:
        return [item for item in self.items if item.passed is False]

    def rows(self):
        return [(item.name, item.deviation, item.tolerance, item.status) for item in self.items]

    def raise_on_failure(self):
        if self.failed:
            item = self.failed[0]
            raise InvariantViolation(item.name, item.deviation, item.tolerance)
        return

def sample_indices(n: int, n_samples: int = N_SAMPLES) -> np.ndarray:
    return np.unique(np.linspace(0, n - 1, min(n, n_samples)).round().astype(int))

def _max(values):
    values = [v for v in values if v is not None]
    return float(max(values)) if values else None

def _rel(a, b):
    return abs(a - b) / max(1., abs(b))

def _pointwise(init, traj, ancilla, t):
    '''
    Analytic rates against finite differences of the closed forms, and
    closed forms against the covariance pathway, at one time.
    '''
    p = traj.at(t)
    derivative = lambda func: time_derivative(lambda u: func(traj.at(u).g), t, unit = traj.time_unit,
                                              hi = traj.t_max)
    record = {}
    fd_srel_S = -derivative(lambda g: srel_S_vac(init, g))
    fd_srel_E = derivative(lambda g: srel_E_init(init, g))
    fd_I_SE = derivative(lambda g: mutual_information_closed(init, g))
    fd_S = derivative(lambda g: system_entropy(init, g))
    record["Pi vs finite difference"] = _rel(production_rate(init, p), fd_srel_S)
    record["env_rate vs finite difference"] = _rel(env_production_rate(init, p), fd_srel_E)
    record["dI_SE_dt vs finite difference"] = _rel(mutual_info_rate_determinant(init, p), fd_I_SE)
    record["dS_WS_dt vs finite difference"] = _rel(system_entropy_rate(init, p), fd_S)
    record["env_rate printed form vs finite difference"] = _rel(env_production_rate_printed(init, p), fd_srel_E)
    record["dI_SE_dt pathways"] = abs(mutual_info_rate(init, p) - mutual_info_rate_determinant(init, p))

    joint = assemble_covariance(init, p)
    K = joint.n_modes - 1
    I_SE = mutual_information_closed(init, p.g)
    record["I_SE vs covariance"] = _rel(mutual_information(joint, ([0], range(1, K + 1))), I_SE)
    record["srel_S_vac vs covariance"] = _rel(relative_entropy(system_state(init, p), vacuum_state(1)),
                                              srel_S_vac(init, p.g))
    record["srel_E_init vs covariance"] = _rel(relative_entropy(environment_state(init, p), vacuum_state(K)),
                                               srel_E_init(init, p.g))
    record["det_SE conservation"] = abs(logdet(joint.cov) - (np.log(init.det0) - K * np.log(4)))

    if ancilla is not None:
        fd_I_AS = derivative(lambda g: ancilla_information(ancilla, g))
        record["dI_AS_dt vs finite difference"] = _rel(ancilla_rate(ancilla, p), fd_I_AS)
        record["dI_AS_dt printed form vs finite difference"] = _rel(ancilla_rate_printed(ancilla, p), fd_I_AS)
        record["I_AS vs covariance"] = _rel(ancilla_information_covariance(ancilla, p.g),
                                            ancilla_information(ancilla, p.g))
    return record

def _current_integrals(init, traj, t):
    '''Phase-space current pathway; None where Γ is undefined or vanishing.'''
    p = traj.at(t)
    try:
        return {"current integral S vs Pi": _rel(current_integral_S(init, traj, t), production_rate(init, p)),
                "current integral E vs env_rate": _rel(current_integral_E(init, traj, t),
                                                       env_production_rate(init, p)),
                "velocity mismatch vs dI_SE_dt": _rel(velocity_mismatch(init, traj, t),
                                                      mutual_info_rate_determinant(init, p))}
    except (VanishingG, VanishingGamma):
        return {}

def _relation_time(traj: AuxTrajectory) -> float:
    '''Grid time with |g|² closest to ½.'''
    return float(traj.grid[np.argmin(np.abs(np.abs(traj.g)**2 - 0.5))])

def check_scenario(s: Scenario, threads: int = 1, quiet: bool = True) -> CheckReport:
    '''
    Run the scenario and every identity and oracle on it. Items with a
    tolerance pass or fail; the printed-form comparisons and the ancilla
    relation ratios are reported only.
    '''
    result = run_scenario(s, threads = threads, quiet = quiet)
    traj, init, records = result.trajectory, s.system, result.records
    ancilla = s.ancilla if s.ancilla is not None else AncillaConfig.from_occupation(init.N)
    grid = traj.grid
    times = [float(t) for t in grid[sample_indices(len(grid))]]
    items = []

    ## rowwise identities
    items.append(_assert_item("decomposition identity",
                              _max(abs(r.decomposition_residual) / _scale(r.Pi, r.env_rate, r.dI_SE_dt)
                                   for r in records), IDENTITY_TOL))
    items.append(_assert_item("flux identity",
                              _max(abs(r.flux_residual) / _scale(r.Pi, r.dS_WS_dt, r.flux) for r in records),
                              IDENTITY_TOL))
    items.append(_assert_item("norm", float(np.max(np.abs(traj.norm - 1))), NORM_TOL))

    ## conservation law
    items.append(_assert_item("conservation", conservation_check(init, traj, grid = times, threads = threads),
                              CONSERVATION_TOL))

    ## pointwise oracles
    pointwise = imap_ordered(lambda t: _pointwise(init, traj, ancilla, t), times, threads = threads)
    tolerances = {"Pi vs finite difference": FD_TOL,
                  "env_rate vs finite difference": FD_TOL,
                  "dI_SE_dt vs finite difference": FD_TOL,
                  "dS_WS_dt vs finite difference": FD_TOL,
                  "dI_AS_dt vs finite difference": FD_TOL,
                  "dI_SE_dt pathways": IDENTITY_TOL,
                  "I_SE vs covariance": IDENTITY_TOL,
                  "srel_S_vac vs covariance": IDENTITY_TOL,
                  "srel_E_init vs covariance": IDENTITY_TOL,
                  "I_AS vs covariance": IDENTITY_TOL,
                  "det_SE conservation": IDENTITY_TOL}
    for name in pointwise[0]:
        deviation = _max(record[name] for record in pointwise)
        if name in tolerances:
            items.append(_assert_item(name, deviation, tolerances[name]))
        else:
            items.append(CheckItem(name, deviation))

    ## current pathway
    currents = imap_ordered(lambda t: _current_integrals(init, traj, t), times, threads = threads)
    for name in ("current integral S vs Pi", "current integral E vs env_rate", "velocity mismatch vs dI_SE_dt"):
        items.append(_assert_item(name, _max(c.get(name) for c in currents), IDENTITY_TOL))

    ## integrated mutual information
    rate = lambda t: mutual_info_rate_determinant(init, traj, t)
    integral, _ = quad(rate, 0., traj.t_max, limit = 500, epsabs = 1e-13, epsrel = 1e-11)
    I_end = mutual_information_closed(init, traj.g[-1])
    items.append(_assert_item("integrated dI_SE_dt vs I_SE", _rel(integral, I_end), FD_TOL))
    items.append(CheckItem("int_dI_SE column vs I_SE", _rel(result.integrals["int_dI_SE"][-1], I_end)))

    ## Lyapunov oracle
    if traj.bath is not None and traj.bath.K <= LYAPUNOV_MAX_K:
        covs = lyapunov_propagate(traj.bath, init, times)
        deviation = max(float(np.max(np.abs(cov - assemble_covariance(init, traj, t, check = False).cov)))
                        for t, cov in zip(times, covs))
        items.append(_assert_item("Lyapunov oracle", deviation, IDENTITY_TOL))
    else:
        items.append(CheckItem("Lyapunov oracle", None))

    ## witnesses
    step = float(np.max(np.diff(grid)))
    misaligned = result.witnesses.misaligned(step)
    items.append(_assert_item("witness alignment", float(len(misaligned)), 0.))

    ## ancilla relation ratios (reported, not asserted)
    relation = ancilla_relation_report(ancilla, traj, _relation_time(traj))
    for term in relation.terms:
        items.append(CheckItem(f"ancilla relation ratio ({term.name})", term.ratio))

    return CheckReport(items, result.witnesses, relation, misaligned)
