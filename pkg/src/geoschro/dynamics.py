"""t-dependent Hamiltonians and unitary propagation.

H(t) = sum_a b_a(t) H_a with scalar coefficient functions b_a and fixed
Hermitian operator matrices H_a.  The Schrodinger vector field is
psi -> -i H(t) psi; its Hamiltonian function is (1/2)<psi|H psi>, whose
differential along phi is 2 Re<phi|H psi> -- hamiltonian_field_residual
measures that identity through two independent code paths.

Integrators:

* ``exact_eig``  -- autonomous only; evaluates U(t) = V e^{-i t L} V^H
  directly at sample times from one eigendecomposition.
* ``magnus2``    -- midpoint exponential: each step applies
  exp(-i dt H(t + dt/2)) through an eigendecomposition, so every step is
  unitary to roundoff (this is what the conservation checks lean on).
* ``cayley2``    -- Crank-Nicolson: (I + i dt/2 H)^{-1} (I - i dt/2 H) with
  the midpoint generator, one dense solve per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sin

import numpy as np

from .errors import BasisMismatch, IntegratorMismatch, NotHermitian
from .hilbert import StateVector, TangentVector, inner
from .numerics import apply_exp_step, hermitian_eigendecompose
from .operators import OperatorMatrix
from .tolerances import DEFAULT, Tolerances

INTEGRATOR_METHODS = ("exact_eig", "magnus2", "cayley2")
COEFFICIENT_KINDS = ("constant", "sinusoid", "polynomial", "table")


@dataclass(frozen=True)
class CoefficientFn:
    """Scalar b(t): constant c; sinusoid a*sin(omega t + phase); polynomial
    in ascending powers; or a clamped piecewise-linear table."""

    kind: str
    c: float = 0.0
    a: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    coeffs: tuple = ()
    table_t: tuple = ()
    table_v: tuple = ()

    def __post_init__(self):
        if self.kind not in COEFFICIENT_KINDS:
            raise ValueError(f"unknown coefficient kind: {self.kind!r}")
        if self.kind == "polynomial" and len(self.coeffs) == 0:
            raise ValueError("polynomial coefficient needs at least one coefficient")
        if self.kind == "table":
            ts = np.asarray(self.table_t, dtype=float)
            if ts.size < 1 or np.any(np.diff(ts) <= 0):
                raise ValueError("table abscissae must be non-empty and strictly increasing")

    @staticmethod
    def constant(c: float) -> "CoefficientFn":
        return CoefficientFn("constant", c=float(c))

    @staticmethod
    def sinusoid(a: float, omega: float, phase: float = 0.0) -> "CoefficientFn":
        return CoefficientFn("sinusoid", a=float(a), omega=float(omega), phase=float(phase))

    @staticmethod
    def polynomial(coeffs) -> "CoefficientFn":
        return CoefficientFn("polynomial", coeffs=tuple(float(v) for v in coeffs))

    @staticmethod
    def table(points) -> "CoefficientFn":
        ts = tuple(float(t) for t, _ in points)
        vs = tuple(float(v) for _, v in points)
        return CoefficientFn("table", table_t=ts, table_v=vs)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.c
        if self.kind == "sinusoid":
            return self.a * sin(self.omega * t + self.phase)
        if self.kind == "polynomial":
            acc = 0.0
            for coeff in reversed(self.coeffs):
                acc = acc * t + coeff
            return acc
        return float(np.interp(t, self.table_t, self.table_v))

    def to_json_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "c": self.c}
        if self.kind == "sinusoid":
            return {"kind": "sinusoid", "a": self.a, "omega": self.omega, "phase": self.phase}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "coeffs": list(self.coeffs)}
        return {"kind": "table", "points": [[t, v] for t, v in zip(self.table_t, self.table_v)]}

    @staticmethod
    def from_json_dict(d: dict) -> "CoefficientFn":
        kind = d["kind"]
        if kind == "constant":
            return CoefficientFn.constant(d["c"])
        if kind == "sinusoid":
            return CoefficientFn.sinusoid(d["a"], d["omega"], d.get("phase", 0.0))
        if kind == "polynomial":
            return CoefficientFn.polynomial(d["coeffs"])
        if kind == "table":
            return CoefficientFn.table(d["points"])
        raise ValueError(f"unknown coefficient kind: {kind!r}")


@dataclass(frozen=True)
class TDepHamiltonian:
    terms: tuple  # of (CoefficientFn, OperatorMatrix, label)

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("Hamiltonian needs at least one term")
        basis = terms[0][1].basis
        for coeff, op, label in terms:
            if op.basis != basis:
                raise BasisMismatch(f"term {label!r} uses a different basis")
            if op.symmetry != "hermitian":
                raise NotHermitian(f"term {label!r} is not flagged Hermitian")
        object.__setattr__(self, "terms", terms)

    @property
    def basis(self):
        return self.terms[0][1].basis

    @property
    def is_autonomous(self) -> bool:
        return all(coeff.is_constant for coeff, _, _ in self.terms)


def assemble(H: TDepHamiltonian, t: float) -> OperatorMatrix:
    """Sum b_a(t) H_a as a Hermitian OperatorMatrix."""
    n = H.basis.size
    M = np.zeros((n, n), dtype=np.complex128)
    rb = lb = 0
    for coeff, op, _ in H.terms:
        M += coeff(t) * op.matrix
        rb = max(rb, op.raise_band)
        lb = max(lb, op.lower_band)
    return OperatorMatrix(H.basis, M, "hermitian", rb, lb)


def schrodinger_rhs(H: TDepHamiltonian, t: float, psi: StateVector) -> TangentVector:
    """The Schrodinger vector field at (t, psi): direction -i H(t) psi."""
    if psi.basis != H.basis:
        raise BasisMismatch("state basis does not match the Hamiltonian")
    A = assemble(H, t)
    return TangentVector(psi, StateVector(psi.basis, -1j * (A.matrix @ psi.coefficients)))


def average_value(A: OperatorMatrix, psi: StateVector, tol: Tolerances = DEFAULT) -> float:
    """<psi|A psi> for Hermitian A; asserts the imaginary residue is roundoff."""
    if A.symmetry != "hermitian":
        raise NotHermitian("average value requires a Hermitian operator")
    if psi.basis != A.basis:
        raise BasisMismatch("average value requires matching bases")
    q = complex(np.vdot(psi.coefficients, A.matrix @ psi.coefficients))
    if abs(q.imag) > tol.imag_part * (1.0 + abs(q)):
        raise NotHermitian(f"imaginary residue {q.imag:.3e} in a Hermitian average")
    return q.real


def hamiltonian_function(A: OperatorMatrix, psi: StateVector, tol: Tolerances = DEFAULT) -> float:
    """The Hamiltonian function of the flow of -iA: (1/2)<psi|A psi>."""
    return 0.5 * average_value(A, psi, tol)


def differential_of_average(A: OperatorMatrix, psi: StateVector, phi: TangentVector) -> float:
    """d<psi|A psi> evaluated on phi: 2 Re<phi|A psi>."""
    if A.symmetry != "hermitian":
        raise NotHermitian("differential of average requires a Hermitian operator")
    if psi.basis != A.basis or phi.direction.basis != A.basis:
        raise BasisMismatch("differential of average requires matching bases")
    return 2.0 * complex(np.vdot(phi.direction.coefficients, A.matrix @ psi.coefficients)).real


def hamiltonian_field_residual(A: OperatorMatrix, psi: StateVector, phi: TangentVector) -> float:
    """|omega(-iA psi, phi) - (1/2) d<psi|A psi>(phi)|; analytically zero."""
    from .hilbert import symplectic_form

    field = TangentVector(psi, StateVector(psi.basis, -1j * (A.matrix @ psi.coefficients)))
    based_phi = TangentVector(psi, phi.direction)
    lhs = symplectic_form(field, based_phi)
    rhs = 0.5 * differential_of_average(A, psi, phi)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class IntegratorSpec:
    method: str
    dt: float

    def __post_init__(self):
        if self.method not in INTEGRATOR_METHODS:
            raise ValueError(f"unknown integrator method: {self.method!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class TrajectoryRecord:
    t: float
    norm: float
    momentum_J: float
    energy: float
    state: StateVector = field(repr=False)

    def to_json_dict(self, include_coefficients: bool = False) -> dict:
        out = {"t": self.t, "norm": self.norm, "J": self.momentum_J, "energy": self.energy}
        if include_coefficients:
            out["re"] = [float(v) for v in self.state.coefficients.real]
            out["im"] = [float(v) for v in self.state.coefficients.imag]
        return out


def _time_grid(t0: float, t1: float, dt: float) -> list[float]:
    """Closed grid t0, t0+dt, ... with the final step shortened onto t1."""
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    times = [t0]
    k = 1
    # tolerate 1-ulp-scale misfits so dt that "divides" (t1-t0) lands exactly
    slack = 64.0 * np.finfo(float).eps * max(1.0, abs(t1), abs(t0))
    while t0 + k * dt < t1 - slack:
        times.append(t0 + k * dt)
        k += 1
    if t1 > t0:
        times.append(t1)
    return times


def _record(H: TDepHamiltonian, t: float, coeffs: np.ndarray) -> TrajectoryRecord:
    psi = StateVector(H.basis, coeffs)
    nrm = float(np.linalg.norm(coeffs))
    A = assemble(H, t)
    energy = complex(np.vdot(coeffs, A.matrix @ coeffs)).real / (nrm * nrm)
    return TrajectoryRecord(t, nrm, -0.5 * nrm * nrm, energy, psi)


def _step_operators(H: TDepHamiltonian, spec: IntegratorSpec, tol: Tolerances):
    """Returns step(t, tau, vec) advancing vec from t to t+tau."""
    if spec.method == "exact_eig":
        if not H.is_autonomous:
            raise IntegratorMismatch("exact_eig requires constant coefficients")
        es = hermitian_eigendecompose(assemble(H, 0.0).matrix, tol)

        def step(t, tau, vec):
            return apply_exp_step(es, tau, vec)

        return step

    if spec.method == "magnus2":

        def step(t, tau, vec):
            es = hermitian_eigendecompose(assemble(H, t + tau / 2.0).matrix, tol)
            return apply_exp_step(es, tau, vec)

        return step

    def step(t, tau, vec):  # cayley2
        M = assemble(H, t + tau / 2.0).matrix
        n = M.shape[0]
        eye = np.eye(n, dtype=np.complex128)
        return np.linalg.solve(eye + 0.5j * tau * M, vec - 0.5j * tau * (M @ vec))

    return step


def propagate(H: TDepHamiltonian, psi0: StateVector, spec: IntegratorSpec,
              t0: float, t1: float, stride: int = 1,
              tol: Tolerances = DEFAULT) -> list[TrajectoryRecord]:
    """Propagate psi0 from t0 to t1, recording every stride-th step plus the
    endpoints.  The grid walks in steps of spec.dt with the final step
    shortened to land exactly on t1."""
    if psi0.basis != H.basis:
        raise BasisMismatch("initial state basis does not match the Hamiltonian")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    times = _time_grid(t0, t1, spec.dt)
    step = _step_operators(H, spec, tol)
    records = [_record(H, t0, psi0.coefficients)]
    current = psi0.coefficients
    for k in range(1, len(times)):
        if spec.method == "exact_eig":
            current = step(t0, times[k] - t0, psi0.coefficients)
        else:
            current = step(times[k - 1], times[k] - times[k - 1], current)
        if k % stride == 0 or k == len(times) - 1:
            records.append(_record(H, times[k], current))
    return records


def symplectic_preservation_check(H: TDepHamiltonian, u: TangentVector, v: TangentVector,
                                  spec: IntegratorSpec, t0: float, t1: float,
                                  tol: Tolerances = DEFAULT) -> float:
    """|omega(Uu, Uv) - omega(u, v)| across the full propagation product U."""
    if u.direction.basis != H.basis or v.direction.basis != H.basis:
        raise BasisMismatch("tangent directions must live in the Hamiltonian basis")
    pair = np.column_stack([u.direction.coefficients, v.direction.coefficients])
    before = complex(np.vdot(pair[:, 0], pair[:, 1])).imag
    times = _time_grid(t0, t1, spec.dt)
    step = _step_operators(H, spec, tol)
    current = pair
    for k in range(1, len(times)):
        if spec.method == "exact_eig":
            current = step(t0, times[k] - t0, pair)
        else:
            current = step(times[k - 1], times[k] - times[k - 1], current)
    after = complex(np.vdot(current[:, 0], current[:, 1])).imag
    return abs(after - before)
