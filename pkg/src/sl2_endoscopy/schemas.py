"""Pydantic schemas for run configurations, reports and API requests."""

from datetime import datetime
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

Verdict = Literal["ok", "passed", "failed", "inconclusive", "not_applicable"]


class ExactValue(BaseModel):
    """An exact rational or cyclotomic value, with an optional float rendering."""

    exact: str = Field(..., description="Exact value, e.g. '4/3' or 'zeta8^1 - zeta8^3'")
    approx: Optional[float] = Field(None, description="Approximate real part (not exact)")
    approx_imag: Optional[float] = Field(None, description="Approximate imaginary part when nonzero (not exact)")


class RunConfig(BaseModel):
    """Everything needed to reproduce one report."""

    command: str = Field(..., description="Subcommand or endpoint that produced the report")
    field: Optional[str] = Field(None, description="Field spec, e.g. 'Qp:p=3,prec=12'")
    ext: Optional[str] = Field(None, description="Extension spec: split | unramified | ramified[N] | ext:t=..,d=..")
    f: Optional[str] = Field(None, description="Test function as cell:coefficient pairs")
    a: Optional[str] = Field(None, description="First coordinate of t = a + b tau (or the split-torus element)")
    b: Optional[str] = Field(None, description="Second coordinate of t = a + b tau")
    x: Optional[str] = Field(None, description="Element of F for epsilon")
    kappa: Optional[str] = Field(None, description="Extension spec of the character kappa ('1' for trivial)")
    depth: Optional[int] = Field(None, ge=0, description="Probe depth")
    level: Optional[int] = Field(None, ge=1, description="Level k of E^1 / E^1_k")
    n_range: Optional[str] = Field(None, description="Inclusive range 'lo..hi' of n")
    oracle: Optional[str] = Field(None, description="Oracle name for audit runs")
    conductor: int = Field(default=0, description="Exponent of the conductor of psi")
    c_mode: Literal["default", "fl"] = Field(default="default", description="Transfer constant c = 1/lambda or c = 1")
    normalization: Literal["F", "E"] = Field(default="F", description="Absolute value used in D(b)")
    quick: bool = Field(default=False, description="Use the reduced verification parameter sets")
    format: Literal["json", "csv"] = Field(default="json", description="Output format")
    seed: int = Field(..., description="Seed for sampled checks")

    @field_validator("n_range")
    @classmethod
    def validate_n_range(cls, v: Optional[str]) -> Optional[str]:
        """Accept 'lo..hi' with lo <= hi."""
        if v is None:
            return v
        lo, sep, hi = v.partition("..")
        if not sep or not lo.strip().isdigit() or not hi.strip().isdigit() or int(lo) > int(hi):
            raise ValueError("n_range must look like 'lo..hi' with 0 <= lo <= hi")
        return f"{int(lo)}..{int(hi)}"


class ReportBase(BaseModel):
    """Fields shared by every report."""

    command: str = Field(..., description="Report kind")
    config: RunConfig = Field(..., description="Configuration that produced the report")
    verdict: Verdict = Field(default="ok", description="ok for plain computations, else the check verdict")

    def table(self) -> List[BaseModel]:
        """Primary table of the report, flattened for CSV."""
        return []


# Extensions and constants

class ClassifyReport(ReportBase):
    field_name: str = Field(..., description="Display name of F")
    ext_label: str = Field(..., description="Extension label")
    kind: Literal["split", "unramified", "ramified"] = Field(..., description="Kind of E/F")
    t: str = Field(..., description="Trace of tau")
    d: str = Field(..., description="Norm of tau")
    discriminant: Optional[str] = Field(None, description="t^2 - 4d away from characteristic 2")
    artin_schreier: Optional[str] = Field(None, description="d / t^2 in characteristic 2")
    standard_basis: bool = Field(..., description="Whether {1, tau} is an O-basis of O_E")
    epsilon_minus_one: int = Field(..., description="eps_{E/F}(-1)")
    norm_level: Optional[int] = Field(None, description="Level at which the norm group was decided, when computed")


class EpsilonReport(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    x: str = Field(..., description="Argument")
    value: Literal[1, -1] = Field(..., description="eps_{E/F}(x)")


class LambdaReport(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    conductor: int = Field(..., description="Exponent of the conductor of psi")
    value: ExactValue = Field(..., description="lambda(E/F, psi)")
    squared: ExactValue = Field(..., description="lambda^2")
    epsilon_minus_one: int = Field(..., description="eps_{E/F}(-1)")
    canonical: bool = Field(..., description="False when a configured sign was used")


# Orbital integrals and transfer

class OrbitalCellModel(BaseModel):
    m: int = Field(..., ge=0, description="Cell index m = v(mu)")
    measure: ExactValue = Field(..., description="C(pi^-m)")
    sign: int = Field(..., description="kappa weight of the shell")
    f_value: ExactValue = Field(..., description="f(Y_m)")
    contribution: ExactValue = Field(..., description="measure * sign * f_value")


class OrbitalReportModel(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    t: str = Field(..., description="Torus element or central element")
    f: str = Field(..., description="Test function label")
    kappa: str = Field(..., description="kappa label")
    value: ExactValue = Field(..., description="Orbital integral")
    vanishing: bool = Field(..., description="kappa is neither trivial nor eps_E")
    normalization: str = Field(..., description="Measure normalization")
    cells: List[OrbitalCellModel] = Field(default_factory=list, description="Cell decomposition")

    def table(self) -> List[BaseModel]:
        return list(self.cells)


class TransferEntryModel(BaseModel):
    t: str = Field(..., description="Representative of E^1 / E^1_k")
    value: ExactValue = Field(..., description="f^E(t)")


class TransferReportModel(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    f: str = Field(..., description="Test function label")
    level: int = Field(..., description="Level k")
    mode: str = Field(..., description="Transfer constant mode")
    smooth_level: Optional[int] = Field(None, description="Smallest level where f^E is constant on cosets")
    factor_at: Optional[str] = Field(None, description="Element at which the transfer factor was evaluated")
    factor: Optional[ExactValue] = Field(None, description="Delta(t) with the requested constant and normalization")
    entries: List[TransferEntryModel] = Field(default_factory=list, description="Tabulated values")

    def table(self) -> List[BaseModel]:
        return list(self.entries)


class FLRowModel(BaseModel):
    label: str = Field(..., description="Probe label")
    expected: ExactValue = Field(..., description="Expected value")
    value: Optional[ExactValue] = Field(None, description="Computed value")
    valuation: Optional[int] = Field(None, description="v(b) or v(a) of the probe")
    stable: Optional[ExactValue] = Field(None, description="O^1(t, 1_K)")
    epsilon: Optional[ExactValue] = Field(None, description="O^eps(t, 1_K)")
    delta: Optional[ExactValue] = Field(None, description="Transfer factor with c = 1")
    realized: bool = Field(..., description="Whether the probe element exists")
    passed: Optional[bool] = Field(None, description="Whether value equals expected; null when the row is unrealized")


class FLReportModel(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    kind: str = Field(..., description="Kind of E/F")
    fl_pass: bool = Field(..., description="True iff every realized probe passed")
    rows: List[FLRowModel] = Field(default_factory=list, description="Probes")

    def table(self) -> List[BaseModel]:
        return list(self.rows)


# Germs

class GermRowModel(BaseModel):
    n: int = Field(..., description="v(b) of t_n")
    realized: bool = Field(..., description="Whether t_n exists")
    marker: Optional[int] = Field(None, description="eps(b_n): which rational class t_n lies in")
    stable: Optional[ExactValue] = Field(None, description="O^1(t_n, f)")
    epsilon: Optional[ExactValue] = Field(None, description="O^eps(t_n, f)")
    delta_epsilon: Optional[ExactValue] = Field(None, description="Delta(t_n) O^eps(t_n, f)")
    weyl_stable: Optional[ExactValue] = Field(None, description="D(t_n) O^1(t_n, f)")


class GermSweepModel(BaseModel):
    unit: int = Field(..., description="Residue unit u in b_n = pi^n u")
    markers: List[int] = Field(default_factory=list, description="Rational-class markers reached")
    n0: Optional[int] = Field(None, description="First n from which Delta O^eps is constant for this unit")


class GermFitModel(BaseModel):
    n: int = Field(..., description="v(b) of t_n")
    gamma_1: ExactValue = Field(..., description="Germ of the identity class")
    gamma_nu: ExactValue = Field(..., description="Germ of the regular unipotent class")
    verified: bool = Field(..., description="Fit reproduces the held-out cell")
    kappa_constant: Optional[ExactValue] = Field(None, description="Gamma^eps * Delta (unramified E)")


class GermReportModel(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    f: str = Field(..., description="Test function label")
    central_value: ExactValue = Field(..., description="f^E(1)")
    n0: Optional[int] = Field(None, description="First n from which Delta O^eps is constant")
    affine: Optional[List[ExactValue]] = Field(None, description="(alpha, beta) with O^1 = alpha + beta q^n")
    rows: List[GermRowModel] = Field(default_factory=list, description="Germ columns")
    sweeps: List[GermSweepModel] = Field(default_factory=list, description="One approach per unit square class")
    fits: List[GermFitModel] = Field(default_factory=list, description="Shalika-germ fits per n")

    def table(self) -> List[BaseModel]:
        return list(self.rows)


class ShalikaRowModel(BaseModel):
    eta: str = Field(..., description="Square-class representative")
    direct: ExactValue = Field(..., description="Integral over eta (F^x)^2")
    fourier: ExactValue = Field(..., description="(1/4) sum_kappa kappa(eta) O^kappa(nu, f)")
    agrees: bool = Field(..., description="direct == fourier")


class ReconstructionModel(BaseModel):
    n: int = Field(..., description="v(b) of t_n")
    stable: ExactValue = Field(..., description="O^1(t_n, f)")
    rebuilt: ExactValue = Field(..., description="Gamma_1 f(1) + Gamma_nu sum_eta O(eta nu, f)")


class ShalikaReportModel(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    f: str = Field(..., description="Test function label")
    available: bool = Field(..., description="False in residue characteristic 2")
    reason: Optional[str] = Field(None, description="Why the comparison was refused")
    additive: Optional[bool] = Field(None, description="Classes add up to the stable unipotent integral")
    rows: List[ShalikaRowModel] = Field(default_factory=list, description="Per square class")
    reconstruction: List[ReconstructionModel] = Field(default_factory=list, description="Germ reconstruction")

    def table(self) -> List[BaseModel]:
        return list(self.rows)


# Spectral side

class CharIdentityRowModel(BaseModel):
    theta: str = Field(..., description="Character label")
    t: str = Field(..., description="Regular torus element")
    lhs: ExactValue = Field(..., description="Delta(t) Xi_theta(t)")
    rhs: ExactValue = Field(..., description="eps(-1) (theta(t) + theta(t^-1))")
    holds: bool = Field(..., description="lhs == rhs")
    galois_symmetric: bool = Field(..., description="Xi_theta(t) == Xi_theta^-1(t)")


class CharIdentityReport(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    level: int = Field(..., description="Level k")
    invariants: List[int] = Field(..., description="Invariant factors of E^1 / E^1_k")
    column_orthogonality: bool = Field(..., description="sum |theta(g)|^2 = |G| at every g")
    rows: List[CharIdentityRowModel] = Field(default_factory=list, description="Identity probes")

    def table(self) -> List[BaseModel]:
        return list(self.rows)


class OrthogonalityRowModel(BaseModel):
    theta: str = Field(..., description="Character label")
    order: int = Field(..., description="Order of theta")
    conductor_level: int = Field(..., description="Smallest level where theta is trivial on E^1_j")
    integral: ExactValue = Field(..., description="Average of |theta + theta^-1|^2")
    expected: int = Field(..., description="4 if theta^2 = 1, else 2")


class OrthogonalityReport(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    level: int = Field(..., description="Level k")
    torus_classes: List[List[int]] = Field(..., description="(w_T, sign) per rational class of tori")
    rows: List[OrthogonalityRowModel] = Field(default_factory=list, description="Per character")

    def table(self) -> List[BaseModel]:
        return list(self.rows)


class WeylRowModel(BaseModel):
    theta: str = Field(..., description="Character label")
    status: Literal["verified", "mismatch", "inconclusive"] = Field(..., description="Outcome")
    lhs: Optional[ExactValue] = Field(None, description="Average of f^E theta over E^1")
    rhs: Optional[ExactValue] = Field(None, description="Weyl-integration side")
    low_part: Optional[ExactValue] = Field(None, description="Contribution away from the center")
    tail: Optional[ExactValue] = Field(None, description="Neighbourhood of the center, from the shell density")
    shell_density: str = Field(default="", description="Constant integrand per unit of theta near the center")
    reason: str = Field(default="", description="Why the check is inconclusive or failed")


class WeylReportModel(ReportBase):
    ext_label: str = Field(..., description="Extension label")
    level: int = Field(..., description="Level k")
    rows: List[WeylRowModel] = Field(default_factory=list, description="Per character")

    def table(self) -> List[BaseModel]:
        return list(self.rows)


# Oracles and the suite

class OracleRowModel(BaseModel):
    probe: str = Field(..., description="What was compared")
    formula: str = Field(..., description="Closed-form value")
    oracle: str = Field(..., description="Enumerated value")
    agrees: bool = Field(..., description="formula == oracle")


class OracleReportModel(ReportBase):
    oracle: str = Field(..., description="Oracle name")
    rows: List[OracleRowModel] = Field(default_factory=list, description="Comparisons")

    def table(self) -> List[BaseModel]:
        return list(self.rows)


class CheckResultModel(BaseModel):
    """Schema for one check of the suite."""

    check_name: str = Field(..., description="Name of the check")
    description: str = Field(..., description="Property checked")
    status: Literal["success", "error"] = Field(..., description="Execution status")
    verdict: Literal["passed", "failed", "inconclusive"] = Field(..., description="Check verdict")
    probes: int = Field(..., ge=0, description="Number of exact comparisons")
    failures: List[str] = Field(default_factory=list, description="Failed probes")
    notes: dict[str, Any] = Field(default_factory=dict, description="Check-specific details")
    execution_time: Optional[float] = Field(None, ge=0, description="Execution time in seconds")
    error_message: Optional[str] = Field(None, description="Error message if the check raised")


class SuiteReportModel(ReportBase):
    mode: str = Field(..., description="sequential or parallel")
    run_id: Optional[str] = Field(None, description="Run identifier (API runs only)")
    check_results: List[CheckResultModel] = Field(..., description="Per-check results")
    total_execution_time: Optional[float] = Field(None, ge=0, description="Total execution time in seconds")

    def table(self) -> List[BaseModel]:
        return list(self.check_results)


# API requests and responses

class ExtRequest(BaseModel):
    """Schema for requests naming a field and an extension."""

    field: str = Field(..., min_length=3, description="Field spec, e.g. 'Qp:p=3,prec=12'")
    ext: str = Field(default="unramified", description="Extension spec")


class EpsilonRequest(ExtRequest):
    x: str = Field(..., description="Element of F")


class OrbitalRequest(ExtRequest):
    a: str = Field(..., description="a in t = a + b tau")
    b: str = Field(..., description="b in t = a + b tau")
    f: str = Field(default="unit", description="Test function")
    kappa: Optional[str] = Field(None, description="Extension spec carrying kappa; omitted for the trivial character")


class FLCheckRequest(ExtRequest):
    depth: int = Field(default=4, ge=0, le=8, description="Largest v(b) probed")
    level: int = Field(default=1, ge=1, le=3, description="Tabulation level")


class VerifyRequest(BaseModel):
    quick: bool = Field(default=True, description="Use the reduced parameter sets")
    orchestration_mode: Literal["sequential", "parallel"] = Field(
        default="sequential",
        description="Execution mode for the checks",
    )
    seed: Optional[int] = Field(None, description="Seed for sampled checks")


class HealthCheckResponse(BaseModel):
    """Schema for health check response."""

    status: str = Field(..., description="Overall health status")
    version: str = Field(..., description="Application version")
    arithmetic: str = Field(..., description="Status of a smoke computation")
    timestamp: datetime = Field(..., description="Check timestamp")


class ErrorResponse(BaseModel):
    """Schema for error responses."""

    error: str = Field(..., description="Error type")
    message: str = Field(..., description="Error message")
    position: Optional[int] = Field(None, description="Offset of a parse error")
    request_id: Optional[str] = Field(None, description="Request ID if available")
