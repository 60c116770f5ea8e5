"""Ordinary least squares with treatment-by-category interactions.

Builds the design (intercept, category dummies, condition, and
condition-by-category interactions), solves the normal equations through
an SVD, and reports the conventional summary: coefficients, standard
errors, t-statistics, two-sided p-values, R-squared, the F-statistic for
the all-slopes-zero null, and residual degrees of freedom.

The t and F tail probabilities are computed from the regularized
incomplete beta function, evaluated by continued fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Cohort
from .errors import DataError, NumericalError
from .validation import check_vector

# Singular values below this multiple of the largest flag rank deficiency.
RANK_TOLERANCE = 1e-10

# Continued-fraction convergence for the incomplete beta function.
_BETACF_EPS = 1e-14
_BETACF_MAX_ITER = 500
_BETACF_FPMIN = 1e-300


@dataclass(frozen=True)
class DesignMatrix:
    """Labeled regression design; first column is the intercept."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.labels):
            raise DataError("design labels do not match the value matrix")
        self.values.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]


def build_interaction_design(cohort: Cohort, variable: str) -> DesignMatrix:
    """Design for outcome ~ variable + condition + condition:variable.

    The variable's first category is the contrast: it gets no dummy, so a
    k-category variable yields 2k columns. Interaction labels follow the
    "Condition:Variable[cat]" convention.
    """
    vi = cohort.schema.variable_index(variable)
    categories = cohort.schema.variable(variable).categories
    codes = cohort.codes[:, vi]
    if not np.any(codes == 0):
        raise DataError(
            f"contrast category {categories[0]!r} of {variable!r} has no rows"
        )

    n = cohort.n_rows
    k = len(categories)
    condition = cohort.treatment.astype(np.float64)
    values = np.empty((n, 2 * k), dtype=np.float64)
    labels = ["Intercept"]
    values[:, 0] = 1.0
    for j, category in enumerate(categories[1:], start=1):
        values[:, j] = codes == j
        labels.append(f"{variable}[{category}]")
    values[:, k] = condition
    labels.append("Condition")
    for j, category in enumerate(categories[1:], start=1):
        values[:, k + j] = condition * (codes == j)
        labels.append(f"Condition:{variable}[{category}]")
    return DesignMatrix(labels=tuple(labels), values=values)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_FPMIN:
        d = _BETACF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise NumericalError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}"
    )


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise NumericalError("incomplete beta requires positive shape parameters")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf(t_value: float, df: int) -> float:
    """Two-sided tail probability of the central t-distribution."""
    if df < 1:
        raise DataError("t distribution requires df >= 1")
    t_value = float(t_value)
    if math.isnan(t_value):
        return float("nan")
    if math.isinf(t_value):
        return 0.0
    if t_value == 0.0:
        return 1.0
    x = df / (df + t_value * t_value)
    return betainc(df / 2.0, 0.5, x)


def f_sf(f_value: float, df_num: int, df_den: int) -> float:
    """Upper tail probability of the F-distribution."""
    if df_num < 1 or df_den < 1:
        raise DataError("F distribution requires positive degrees of freedom")
    f_value = float(f_value)
    if math.isnan(f_value):
        return float("nan")
    if math.isinf(f_value):
        return 0.0
    if f_value <= 0.0:
        return 1.0
    x = df_den / (df_den + df_num * f_value)
    return betainc(df_den / 2.0, df_num / 2.0, x)


@dataclass(frozen=True)
class Coefficient:
    label: str
    coef: float
    std_err: float
    t: float
    p: float


@dataclass(frozen=True)
class OlsSummary:
    coefficients: tuple[Coefficient, ...]
    r_squared: float
    f_statistic: float
    f_pvalue: float
    df_residuals: int
    n_rows: int

    def to_dict(self) -> dict:
        return {
            "coefficients": [
                {
                    "label": c.label,
                    "coef": c.coef,
                    "std_err": c.std_err,
                    "t": c.t,
                    "p": c.p,
                }
                for c in self.coefficients
            ],
            "r_squared": self.r_squared,
            "f_statistic": self.f_statistic,
            "f_pvalue": self.f_pvalue,
            "df_residuals": self.df_residuals,
            "n_rows": self.n_rows,
        }

    def to_text(self) -> str:
        width = max(len(c.label) for c in self.coefficients)
        width = max(width, len("Intercept"))
        header = (
            f"{'':<{width}}  {'coef':>10}  {'std err':>9}  {'t':>9}  {'P>|t|':>9}"
        )
        rule = "=" * len(header)
        dash = "-" * len(header)
        lines = ["OLS Regression Results", rule, header, dash]
        for c in self.coefficients:
            lines.append(
                f"{c.label:<{width}}  {c.coef:>10.4f}  {c.std_err:>9.3f}"
                f"  {c.t:>9.3f}  {c.p:>9.3f}"
            )
        lines.append(rule)
        lines.append(f"R-squared:        {self.r_squared:.3f}")
        lines.append(f"F-statistic:      {self.f_statistic:.3f}")
        lines.append(f"Prob (F):         {self.f_pvalue:.3g}")
        lines.append(f"Df Residuals:     {self.df_residuals}")
        lines.append(f"No. Observations: {self.n_rows}")
        return "\n".join(lines) + "\n"


def _as_design(X) -> DesignMatrix:
    if isinstance(X, DesignMatrix):
        return X
    # copy so marking the design read-only never touches caller arrays
    values = np.array(X, dtype=np.float64, order="C", copy=True)
    if values.ndim != 2:
        raise DataError("design must be a 2D matrix")
    labels = tuple(f"x{j}" for j in range(values.shape[1]))
    return DesignMatrix(labels=labels, values=values)


def fit_ols(y, X) -> OlsSummary:
    """Least-squares fit with the classical inference summary.

    Accepts a DesignMatrix or a plain matrix (columns then named x0..).
    Raises on rank deficiency, naming a dependent column, and on n <= p.
    """
    design = _as_design(X)
    values = design.values
    n, p = values.shape
    y = check_vector(y, n_rows=n, name="response")
    if n <= p:
        raise DataError(f"need more rows than columns: n={n}, p={p}")

    u, s, vt = np.linalg.svd(values, full_matrices=False)
    if s[0] <= 0.0 or s[-1] < RANK_TOLERANCE * s[0]:
        null_vector = vt[-1]
        column = int(np.argmax(np.abs(null_vector)))
        raise DataError(
            f"design is rank deficient: column {design.labels[column]!r} is "
            "linearly dependent on the others"
        )

    beta = vt.T @ ((u.T @ y) / s)
    residuals = y - values @ beta
    rss = float(residuals @ residuals)
    centered = y - y.mean()
    tss = float(centered @ centered)
    df = n - p
    sigma2 = rss / df
    # diag of (X'X)^{-1} from the SVD factors
    xtx_inv_diag = np.einsum("ji,j->i", vt**2, 1.0 / s**2)
    std_err = np.sqrt(sigma2 * xtx_inv_diag)

    coefficients = []
    for label, b, se in zip(design.labels, beta, std_err):
        if se > 0.0:
            t = float(b / se)
        else:
            t = 0.0 if b == 0.0 else math.copysign(math.inf, b)
        coefficients.append(
            Coefficient(
                label=label,
                coef=float(b),
                std_err=float(se),
                t=t,
                p=t_sf(t, df),
            )
        )

    # R^2 is 0 by convention when the response is constant
    r_squared = 1.0 - rss / tss if tss > 0.0 else 0.0
    if p > 1:
        if rss > 0.0:
            f_statistic = ((tss - rss) / (p - 1)) / (rss / df)
        else:
            f_statistic = math.inf
        f_pvalue = f_sf(f_statistic, p - 1, df)
    else:
        f_statistic = float("nan")
        f_pvalue = float("nan")

    return OlsSummary(
        coefficients=tuple(coefficients),
        r_squared=float(min(max(r_squared, 0.0), 1.0)),
        f_statistic=float(f_statistic),
        f_pvalue=float(f_pvalue),
        df_residuals=df,
        n_rows=n,
    )


def fit_interaction_ols(cohort: Cohort, variable: str) -> OlsSummary:
    """Convenience wrapper: build the interaction design and fit it."""
    design = build_interaction_design(cohort, variable)
    return fit_ols(cohort.outcome.astype(np.float64), design)
