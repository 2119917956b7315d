"""Mixed-integer linear feasibility model for mixed stability candidates.

The candidate x* must satisfy, for every pure strategy x, either a strict
payoff deficit against the population or a payoff tie combined with a strict
self-play deficit. A binary y_x selects the branch via big-M rows. The one
nonlinear quantity, the population self-payoff z = x*' A x*, is handled by a
separable reformulation: every product x_i * x_j is written with the squares
(x_i + x_j)^2 and (x_i - x_j)^2, and each square is approximated piecewise
linearly with an SOS2 lambda system over a uniform breakpoint grid.

A secant through two grid points lies above the parabola by at most
h^2 / 4 on a grid of spacing h, and never below it. The model therefore ties
z to the lambda system with a two-sided corridor whose widths are the exact
per-term secant-error bounds, instead of pinning z to the secant value. The
corridor keeps every game whose exact solution sits between grid points
feasible (pinning z would cut those solutions off) and guarantees
|z - x*' A x*| stays within the advertised linearization bound for any
feasible assignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import GameMatrix

__all__ = [
    "BuildParams",
    "Variable",
    "LinearRow",
    "SquareTerm",
    "ModelIR",
    "build_model",
    "linearize_quadratic_form",
    "export_lp",
    "verify_assignment",
    "secant_square_value",
    "secant_gap_bound",
    "linearization_error_bound",
]

LIN_FEAS_TOL = 1e-7
INT_TOL = 1e-6
SOS_NONZERO_TOL = 1e-7


@dataclass(frozen=True)
class BuildParams:
    """Model construction parameters.

    k is the number of breakpoint segments per square term (k+1 grid points).
    eps is the strict-inequality margin; big_m defaults to 1 + eps, the
    smallest constant that deactivates a row for payoffs in [0, 1]. The
    per-row-family overrides (eps1/eps2 for the two strict rows, m1..m4 for
    the four big-M rows) default to the shared values.
    """

    k: int = 20
    eps: float = 1e-5
    big_m: float | None = None
    eps1: float | None = None
    eps2: float | None = None
    m1: float | None = None
    m2: float | None = None
    m3: float | None = None
    m4: float | None = None

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"breakpoint count k must be >= 2, got {self.k}")
        if self.eps <= 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.big_m is not None and self.big_m < 1.0 + self.eps:
            raise ValueError(
                f"big_m={self.big_m} too small; need >= 1 + eps for normalized payoffs"
            )

    def resolved(self) -> tuple[float, float, float, float, float, float]:
        """(eps1, eps2, m1, m2, m3, m4) with defaults filled in."""
        big = self.big_m if self.big_m is not None else 1.0 + self.eps
        return (
            self.eps1 if self.eps1 is not None else self.eps,
            self.eps2 if self.eps2 is not None else self.eps,
            self.m1 if self.m1 is not None else big,
            self.m2 if self.m2 is not None else big,
            self.m3 if self.m3 is not None else big,
            self.m4 if self.m4 is not None else big,
        )


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float
    ub: float
    binary: bool = False


@dataclass(frozen=True)
class LinearRow:
    """coeffs . vars <rel> rhs with rel one of '<=', '=', '>='."""

    coeffs: dict[int, float]
    rel: str
    rhs: float
    name: str = ""

    def __post_init__(self) -> None:
        if self.rel not in ("<=", "=", ">="):
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True)
class SquareTerm:
    """One linearized square q ~= s^2 with s a linear expression of the x's.

    kind 'diag' has s = x_i, 'plus' has s = x_i + x_j, 'minus' has s = x_i - x_j.
    weight is the coefficient of q in the z corridor rows. The lambdas occupy
    variable indices lam_start .. lam_start + k (inclusive) and form one SOS2 set.
    """

    kind: str
    i: int
    j: int | None
    weight: float
    lo: float
    hi: float
    breakpoints: np.ndarray
    q_index: int
    lam_start: int
    lam_count: int

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.lam_count - 1)

    def s_coeffs(self) -> dict[int, float]:
        """Coefficients of s over the x variables (x_i at index i)."""
        if self.kind == "diag":
            return {self.i: 1.0}
        if self.kind == "plus":
            return {self.i: 1.0, self.j: 1.0}
        return {self.i: 1.0, self.j: -1.0}


@dataclass
class ModelIR:
    """Solver-agnostic linearized feasibility program.

    Rows reference variables by index into ``variables``. ``sos2_sets`` are
    ordered lambda-index lists; at most two members may be nonzero and they
    must be adjacent. ``payoffs`` carries the normalized matrix whose
    quadratic form the lambda system approximates, so a solver can verify
    candidates against the original quadratic constraint.
    """

    m: int
    k: int
    eps: float
    big_m: float
    variables: list[Variable]
    rows: list[LinearRow]
    sos2_sets: list[list[int]]
    squares: list[SquareTerm]
    payoffs: np.ndarray
    x_indices: list[int]
    y_indices: list[int]
    z_index: int
    env_plus: float
    env_minus: float
    name_to_index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.name_to_index:
            self.name_to_index = {v.name: i for i, v in enumerate(self.variables)}
        for row in self.rows:
            for idx in row.coeffs:
                if not 0 <= idx < len(self.variables):
                    raise ValueError(f"row {row.name!r} references unknown variable {idx}")

    @property
    def continuous_vars(self) -> list[Variable]:
        return [v for v in self.variables if not v.binary]

    @property
    def binary_vars(self) -> list[Variable]:
        return [v for v in self.variables if v.binary]

    def bounds_array(self) -> np.ndarray:
        return np.array([[v.lb, v.ub] for v in self.variables])


def secant_square_value(s: float, lo: float, hi: float, k: int) -> float:
    """Value at s of the piecewise-linear interpolant of t^2 on a uniform grid."""
    t = np.linspace(lo, hi, k + 1)
    if not lo <= s <= hi:
        raise ValueError(f"s={s} outside [{lo}, {hi}]")
    r = min(int(np.searchsorted(t, s, side="right")) - 1, k - 1)
    r = max(r, 0)
    h = t[r + 1] - t[r]
    w = (s - t[r]) / h
    return float((1.0 - w) * t[r] ** 2 + w * t[r + 1] ** 2)


def secant_gap_bound(lo: float, hi: float, k: int) -> float:
    """Worst overestimate of the secant interpolant of t^2: h^2/4 at segment midpoints."""
    h = (hi - lo) / k
    return h * h / 4.0


def _interp_lambdas(s: float, breakpoints: np.ndarray) -> np.ndarray:
    """SOS2-feasible lambda weights reproducing s on the grid (two adjacent nonzero)."""
    t = breakpoints
    k = t.size - 1
    r = min(int(np.searchsorted(t, s, side="right")) - 1, k - 1)
    r = max(r, 0)
    lam = np.zeros(t.size)
    w = (s - t[r]) / (t[r + 1] - t[r])
    lam[r] = 1.0 - w
    lam[r + 1] = w
    return lam


def _square_plan(payoffs: np.ndarray, k: int) -> list[tuple[str, int, int | None, float, float, float]]:
    """Canonical square-term listing: (kind, i, j, weight, lo, hi).

    z = sum_i a_ii x_i^2 + sum_{i<j} (a_ij + a_ji) x_i x_j, and each product is
    ((x_i + x_j)^2 - (x_i - x_j)^2) / 4. Simplex membership bounds x_i + x_j in
    [0, 1] and x_i - x_j in [-1, 1].
    """
    m = payoffs.shape[0]
    plan: list[tuple[str, int, int | None, float, float, float]] = []
    for i in range(m):
        plan.append(("diag", i, None, float(payoffs[i, i]), 0.0, 1.0))
    for i in range(m):
        for j in range(i + 1, m):
            c = float(payoffs[i, j] + payoffs[j, i])
            plan.append(("plus", i, j, c / 4.0, 0.0, 1.0))
            plan.append(("minus", i, j, -c / 4.0, -1.0, 1.0))
    return plan


def _emit_linearization(
    payoffs: np.ndarray,
    k: int,
    x_indices: list[int],
    z_index: int,
    next_index: int,
) -> tuple[list[Variable], list[LinearRow], list[list[int]], list[SquareTerm], float, float]:
    """Lambda/SOS2 subsystem tying z to the quadratic form over the given x variables.

    Returns the new variables (starting at next_index), their rows, the SOS2
    sets, the square-term records, and the corridor half-widths (env_plus
    below the secant combination, env_minus above it).
    """
    variables: list[Variable] = []
    rows: list[LinearRow] = []
    sos2: list[list[int]] = []
    squares: list[SquareTerm] = []
    env_plus = 0.0
    env_minus = 0.0
    idx = next_index

    for kind, i, j, weight, lo, hi in _square_plan(payoffs, k):
        tag = f"{kind}_{i}" if j is None else f"{kind}_{i}_{j}"
        t = np.linspace(lo, hi, k + 1)
        q_index = idx
        qhi = max(lo * lo, hi * hi)
        variables.append(Variable(f"q_{tag}", 0.0, qhi))
        idx += 1
        lam_start = idx
        for r in range(k + 1):
            variables.append(Variable(f"lam_{tag}_{r}", 0.0, 1.0))
            idx += 1
        lam_idx = list(range(lam_start, lam_start + k + 1))
        sos2.append(lam_idx)

        rows.append(
            LinearRow({li: 1.0 for li in lam_idx}, "=", 1.0, name=f"lamsum_{tag}")
        )
        term = SquareTerm(kind, i, j, weight, lo, hi, t, q_index, lam_start, k + 1)
        link = {lam_start + r: float(t[r]) for r in range(k + 1)}
        for xi, coef in term.s_coeffs().items():
            link[x_indices[xi]] = link.get(x_indices[xi], 0.0) - coef
        rows.append(LinearRow(link, "=", 0.0, name=f"link_{tag}"))
        qdef = {lam_start + r: -float(t[r] ** 2) for r in range(k + 1)}
        qdef[q_index] = 1.0
        rows.append(LinearRow(qdef, "=", 0.0, name=f"qdef_{tag}"))

        gap = weight * secant_gap_bound(lo, hi, k)
        if gap > 0.0:
            env_plus += gap
        else:
            env_minus -= gap
        squares.append(term)

    # Corridor: z - sum_sq weight * q in [-env_plus, env_minus]. The secant
    # combination overshoots the true quadratic by at most env_plus where
    # weights are positive and undershoots by at most env_minus where they
    # are negative, so the true value always lies inside.
    combo = {sq.q_index: sq.weight for sq in squares}
    up = {z_index: 1.0}
    up.update({qi: -w for qi, w in combo.items()})
    rows.append(LinearRow(up, "<=", env_minus, name="z_upper"))
    down = {z_index: -1.0}
    down.update({qi: w for qi, w in combo.items()})
    rows.append(LinearRow(down, "<=", env_plus, name="z_lower"))

    return variables, rows, sos2, squares, env_plus, env_minus


def linearize_quadratic_form(payoffs: np.ndarray, k: int):
    """Standalone linearization of z ~= x' A x over the probability simplex.

    Builds its own x and z variables followed by the lambda subsystem; useful
    for inspecting or testing the approximation in isolation. Returns a
    ModelIR without big-M rows or binaries.
    """
    a = np.asarray(payoffs, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("payoffs must be a square matrix")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    m = a.shape[0]
    variables = [Variable(f"x_{i}", 0.0, 1.0) for i in range(m)]
    x_indices = list(range(m))
    z_index = m
    variables.append(Variable("z", -1.0, 2.0))
    rows = [LinearRow({i: 1.0 for i in x_indices}, "=", 1.0, name="simplex")]
    lin_vars, lin_rows, sos2, squares, env_plus, env_minus = _emit_linearization(
        a, k, x_indices, z_index, len(variables)
    )
    variables.extend(lin_vars)
    rows.extend(lin_rows)
    return ModelIR(
        m=m,
        k=k,
        eps=0.0,
        big_m=0.0,
        variables=variables,
        rows=rows,
        sos2_sets=sos2,
        squares=squares,
        payoffs=a,
        x_indices=x_indices,
        y_indices=[],
        z_index=z_index,
        env_plus=env_plus,
        env_minus=env_minus,
    )


def linearization_error_bound(game_or_payoffs, k: int) -> float:
    """A-priori bound on |z - x' A x| over feasible assignments at k segments."""
    a = game_or_payoffs.payoffs if isinstance(game_or_payoffs, GameMatrix) else np.asarray(game_or_payoffs)
    env_plus = env_minus = 0.0
    for _, _, _, weight, lo, hi in _square_plan(a, k):
        gap = weight * secant_gap_bound(lo, hi, k)
        if gap > 0.0:
            env_plus += gap
        else:
            env_minus -= gap
    return env_plus + env_minus


def build_model(game: GameMatrix, params: BuildParams = BuildParams()) -> ModelIR:
    """Assemble the full feasibility model for a normalized game.

    Variable order: x_0..x_{m-1}, z, then per square term its q followed by its
    k+1 lambdas, then the binaries y_0..y_{m-1}. Row order: the four big-M rows
    per pure strategy, the probability simplex row, the lambda subsystem, and
    the two z corridor rows. Both orders are deterministic so exports are
    byte-stable.
    """
    if not game.is_normalized:
        raise ValueError(
            "build_model requires payoffs in [0, 1]; the big-M constants assume it"
        )
    a = game.payoffs
    m = game.m
    eps1, eps2, m1, m2, m3, m4 = params.resolved()
    k = params.k

    variables = [Variable(f"x_{i}", 0.0, 1.0) for i in range(m)]
    x_indices = list(range(m))
    z_index = m
    variables.append(Variable("z", -1.0, 2.0))

    lin_vars, lin_rows, sos2, squares, env_plus, env_minus = _emit_linearization(
        a, k, x_indices, z_index, len(variables)
    )
    variables.extend(lin_vars)

    y_indices = []
    for i in range(m):
        y_indices.append(len(variables))
        variables.append(Variable(f"y_{i}", 0.0, 1.0, binary=True))

    rows: list[LinearRow] = []
    for j in range(m):
        row_j = {x_indices[i]: float(a[j, i]) for i in range(m)}
        col_j = {x_indices[i]: float(a[i, j]) for i in range(m)}
        yj = y_indices[j]

        # u1(j, x*) <= z - eps1 + M1 y_j   (y_j = 0: mutant strictly worse)
        c = dict(row_j)
        c[z_index] = c.get(z_index, 0.0) - 1.0
        c[yj] = -m1
        rows.append(LinearRow(c, "<=", -eps1, name=f"strict_{j}"))

        # u1(j, x*) <= z + M2 (1 - y_j)    (y_j = 1: payoff tie, upper half)
        c = dict(row_j)
        c[z_index] = c.get(z_index, 0.0) - 1.0
        c[yj] = m2
        rows.append(LinearRow(c, "<=", m2, name=f"tie_ub_{j}"))

        # z <= u1(j, x*) + M3 (1 - y_j)    (tie, lower half)
        c = {idx: -v for idx, v in row_j.items()}
        c[z_index] = c.get(z_index, 0.0) + 1.0
        c[yj] = m3
        rows.append(LinearRow(c, "<=", m3, name=f"tie_lb_{j}"))

        # u1(j, j) <= u1(x*, j) - eps2 + M4 (1 - y_j)   (self-play deficit)
        c = {idx: -v for idx, v in col_j.items()}
        c[yj] = m4
        rows.append(
            LinearRow(c, "<=", m4 - eps2 - float(a[j, j]), name=f"selfplay_{j}")
        )

    rows.append(LinearRow({i: 1.0 for i in x_indices}, "=", 1.0, name="simplex"))
    rows.extend(lin_rows)

    return ModelIR(
        m=m,
        k=k,
        eps=params.eps,
        big_m=m1,
        variables=variables,
        rows=rows,
        sos2_sets=sos2,
        squares=squares,
        payoffs=a,
        x_indices=x_indices,
        y_indices=y_indices,
        z_index=z_index,
        env_plus=env_plus,
        env_minus=env_minus,
    )


def interpolation_assignment(model: ModelIR, x: np.ndarray, y: np.ndarray | None = None) -> dict[str, float]:
    """Assignment at a given strategy: secant lambdas, q values, z at the true quadratic.

    Used to certify feasibility constructively and by the solver to assemble
    candidate leaves. y defaults to all zeros.
    """
    x = np.asarray(x, dtype=float)
    values: dict[str, float] = {}
    for i, xi in enumerate(model.x_indices):
        values[model.variables[xi].name] = float(x[i])
    z_true = float(x @ model.payoffs @ x)
    values[model.variables[model.z_index].name] = z_true
    for sq in model.squares:
        coeffs = sq.s_coeffs()
        s = sum(coef * x[i] for i, coef in coeffs.items())
        lam = _interp_lambdas(s, sq.breakpoints)
        for r in range(sq.lam_count):
            values[model.variables[sq.lam_start + r].name] = float(lam[r])
        values[model.variables[sq.q_index].name] = float(lam @ sq.breakpoints**2)
    yvals = y if y is not None else np.zeros(model.m)
    for i, yi in enumerate(model.y_indices):
        values[model.variables[yi].name] = float(yvals[i])
    return values


def verify_assignment(
    model: ModelIR,
    assignment: dict[str, float],
    lin_tol: float = LIN_FEAS_TOL,
    int_tol: float = INT_TOL,
    sos_tol: float = SOS_NONZERO_TOL,
) -> list[str]:
    """Independent feasibility check of an assignment against the IR.

    Re-evaluates every bound, row, binary, and SOS2 set from scratch (no solver
    state involved) and returns human-readable violation descriptions; an empty
    list means the assignment is feasible.
    """
    violations: list[str] = []
    values = np.empty(len(model.variables))
    for i, v in enumerate(model.variables):
        if v.name not in assignment:
            violations.append(f"missing value for {v.name}")
            return violations
        values[i] = assignment[v.name]

    for i, v in enumerate(model.variables):
        if values[i] < v.lb - lin_tol or values[i] > v.ub + lin_tol:
            violations.append(
                f"{v.name}={values[i]!r} outside bounds [{v.lb}, {v.ub}]"
            )
        if v.binary and min(abs(values[i]), abs(values[i] - 1.0)) > int_tol:
            violations.append(f"binary {v.name}={values[i]!r} not integral")

    for row in model.rows:
        lhs = sum(coef * values[idx] for idx, coef in row.coeffs.items())
        resid = lhs - row.rhs
        ok = (
            resid <= lin_tol
            if row.rel == "<="
            else (resid >= -lin_tol if row.rel == ">=" else abs(resid) <= lin_tol)
        )
        if not ok:
            violations.append(f"row {row.name} violated by {resid!r}")

    for si, lam_idx in enumerate(model.sos2_sets):
        nz = [pos for pos, idx in enumerate(lam_idx) if abs(values[idx]) > sos_tol]
        if len(nz) > 2 or (len(nz) == 2 and nz[1] - nz[0] != 1):
            violations.append(f"sos2 set {si} has nonzeros at positions {nz}")

    return violations


def export_lp(model: ModelIR) -> str:
    """Serialize the model as LP-format text.

    Includes an empty objective (pure feasibility), Subject To / Bounds /
    Binary / SOS sections, and SOS2 weights equal to 1-based breakpoint
    ordinals. Output is deterministic for a given model.
    """

    def num(v: float) -> str:
        return repr(float(v))

    def term(coef: float, name: str, first: bool) -> str:
        sign = "-" if coef < 0 else ("" if first else "+")
        mag = abs(coef)
        lead = "" if first else " "
        return f"{lead}{sign} {num(mag)} {name}" if not first else f"{sign}{num(mag)} {name}"

    lines = ["Minimize", " obj:", "Subject To"]
    for ri, row in enumerate(model.rows):
        parts: list[str] = []
        for idx in sorted(row.coeffs):
            coef = row.coeffs[idx]
            if coef == 0.0:
                continue
            parts.append(term(coef, model.variables[idx].name, not parts))
        rel = {"<=": "<=", ">=": ">=", "=": "="}[row.rel]
        rname = row.name or f"c{ri}"
        lines.append(f" {rname}: {' '.join(parts)} {rel} {num(row.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.binary:
            continue
        lines.append(f" {num(v.lb)} <= {v.name} <= {num(v.ub)}")
    lines.append("Binary")
    lines.append(" " + " ".join(v.name for v in model.variables if v.binary))
    lines.append("SOS")
    for si, lam_idx in enumerate(model.sos2_sets):
        members = " ".join(
            f"{model.variables[idx].name}:{pos + 1}" for pos, idx in enumerate(lam_idx)
        )
        lines.append(f" s{si}: S2 :: {members}")
    lines.append("End")
    return "\n".join(lines) + "\n"
