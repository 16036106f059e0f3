"""
Scattering data for the KP equation.

The scattering kernels handled here are sums of exponential one-soliton
components in semi-additive form,

    p(z + x, zeta + x; y, t) = sum_j -w_j (a_j + b_j)
        * exp(a_j (z + x) + b_j (zeta + x) + Lambda_j y + Omega_j t),

with Lambda_j = a_j^2 - b_j^2 and Omega_j = 4 (a_j^3 + b_j^3). Each component
solves the linearised KP equation exactly, so the kernel can be advanced to
any time analytically.

The module also provides the closed-form one-soliton field g and tau function
used as oracles by the solvers, and analytic residuals of the two constraints
every kernel must satisfy.

All functions are pure and accept numpy arrays wherever a coordinate is
expected, broadcasting in the usual way.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import partial
from typing import List, Sequence, Tuple, Union

import numpy as np

log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class ScatteringDataError(ValueError):
    """Raised when soliton parameters or scattering data are invalid."""

    pass


@dataclass(frozen=True)
class SolitonComponent:
    """
    One exponential component of the scattering kernel.

    Attributes:
        a: Decay rate in the z slot
        b: Decay rate in the zeta slot
        lam: Frequency in y, always a^2 - b^2
        omega: Frequency in t, always 4(a^3 + b^3)
        weight: Non-negative amplitude multiplier (1 for the standard soliton)
    """

    a: float
    b: float
    lam: float
    omega: float
    weight: float = 1.0

    @property
    def speed(self) -> float:
        """Velocity of the soliton ridge along x for fixed y."""
        return -self.omega / (self.a + self.b)


@dataclass(frozen=True)
class ScatteringData:
    """
    Superposition of soliton components, optionally shifted in x and y.

    The shifts move the kernel's x and y arguments, so the field computed at
    grid point (x, y) is the unshifted field at (x - xshift, y - yshift).
    """

    components: Tuple[SolitonComponent, ...]
    xshift: float = 0.0
    yshift: float = 0.0

    def __post_init__(self) -> None:
        if not self.components:
            raise ScatteringDataError("Scattering data needs at least one soliton")

    def __len__(self) -> int:
        return len(self.components)

    def __add__(self, other: "ScatteringData") -> "ScatteringData":
        if (self.xshift, self.yshift) != (other.xshift, other.yshift):
            raise ScatteringDataError("Cannot superpose data with different shifts")
        return replace(self, components=self.components + other.components)

    def shifted(self, xshift: float, yshift: float) -> "ScatteringData":
        """Return the same components with new display shifts."""
        return replace(self, xshift=xshift, yshift=yshift)

    def scaled(self, factor: float) -> "ScatteringData":
        """Return the data with every component weight multiplied by factor."""
        return replace(
            self,
            components=tuple(
                replace(c, weight=c.weight * factor) for c in self.components
            ),
        )

    @property
    def is_single_soliton(self) -> bool:
        return len(self.components) == 1


def make_soliton(a: float, b: float, weight: float = 1.0) -> SolitonComponent:
    """
    Build a soliton component from its decay rates.

    Args:
        a: Decay rate in the z slot
        b: Decay rate in the zeta slot
        weight: Amplitude multiplier, must be finite and non-negative

    Returns:
        The component with lam = a^2 - b^2 and omega = 4(a^3 + b^3)

    Raises:
        ScatteringDataError: If a + b <= 0 (the kernel would not decay on the
            half-line) or the weight is negative or not finite
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ScatteringDataError(f"Soliton parameters must be finite: a={a}, b={b}")
    if a + b <= 0:
        raise ScatteringDataError(
            f"Soliton with a={a}, b={b} does not decay (a + b must be positive)"
        )
    if not math.isfinite(weight) or weight < 0:
        raise ScatteringDataError(f"Soliton weight must be non-negative: {weight}")
    return SolitonComponent(
        a=a, b=b, lam=a * a - b * b, omega=4.0 * (a**3 + b**3), weight=float(weight)
    )


def make_data(
    params: Sequence[Sequence[float]], xshift: float = 0.0, yshift: float = 0.0
) -> ScatteringData:
    """Build scattering data from (a, b) or (a, b, weight) tuples."""
    return ScatteringData(
        components=tuple(make_soliton(*p) for p in params),
        xshift=xshift,
        yshift=yshift,
    )


def parse_solitons(text: str) -> List[Tuple[float, ...]]:
    """
    Parse the soliton list format "a1,b1;a2,b2,w2;...".

    Components are separated by semicolons, parameters by commas. A third
    parameter is the optional weight.

    Returns:
        One (a, b) or (a, b, w) tuple per component

    Raises:
        ScatteringDataError: On an empty list or malformed component
    """
    params: List[Tuple[float, ...]] = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [s.strip() for s in chunk.split(",")]
        if len(parts) not in (2, 3):
            raise ScatteringDataError(
                f"Soliton '{chunk}' must have the form a,b or a,b,weight"
            )
        try:
            params.append(tuple(float(s) for s in parts))
        except ValueError:
            raise ScatteringDataError(f"Soliton '{chunk}' contains a non-number")
    if not params:
        raise ScatteringDataError("Soliton list is empty")
    return params


def format_solitons(data: ScatteringData) -> str:
    """Inverse of parse_solitons (weights written only when not 1)."""
    chunks = []
    for c in data.components:
        values = [c.a, c.b] if c.weight == 1.0 else [c.a, c.b, c.weight]
        chunks.append(",".join(repr(v) for v in values))
    return ";".join(chunks)


def _exponent(
    c: SolitonComponent,
    s: ArrayLike,
    sigma: ArrayLike,
    y: ArrayLike,
    t: ArrayLike,
    xshift: float,
    yshift: float,
) -> ArrayLike:
    # the shift enters both kernel slots, s = z + x and sigma = zeta + x
    return (
        c.a * (s - xshift)
        + c.b * (sigma - xshift)
        + c.lam * (y - yshift)
        + c.omega * t
    )


def eval_kernel(
    data: ScatteringData,
    s: ArrayLike,
    sigma: ArrayLike,
    y: ArrayLike,
    t: ArrayLike,
) -> ArrayLike:
    """
    Evaluate p(s, sigma; y, t) with s = z + x and sigma = zeta + x.

    Exponentials are evaluated directly in double precision. Very large
    arguments overflow to -inf rather than raising.

    Returns:
        A float for scalar input, otherwise an array of the broadcast shape
    """
    total: ArrayLike = 0.0
    with np.errstate(over="ignore"):
        for c in data.components:
            amplitude = -c.weight * (c.a + c.b)
            total = total + amplitude * np.exp(
                _exponent(c, s, sigma, y, t, data.xshift, data.yshift)
            )
    return total


def kernel_derivative(
    data: ScatteringData,
    s: ArrayLike,
    sigma: ArrayLike,
    y: ArrayLike,
    t: ArrayLike,
    ds: int = 0,
    dsigma: int = 0,
    dy: int = 0,
    dt: int = 0,
) -> ArrayLike:
    """
    Mixed partial derivative of the kernel, in closed form.

    Each derivative order multiplies a component by the matching rate, so
    d^ds/ds d^dsigma/dsigma d^dy/dy d^dt/dt p is a sum of
    a^ds b^dsigma lam^dy omega^dt times the component.
    """
    total: ArrayLike = 0.0
    with np.errstate(over="ignore"):
        for c in data.components:
            factor = (c.a**ds) * (c.b**dsigma) * (c.lam**dy) * (c.omega**dt)
            amplitude = -c.weight * (c.a + c.b) * factor
            total = total + amplitude * np.exp(
                _exponent(c, s, sigma, y, t, data.xshift, data.yshift)
            )
    return total


def constraint_residuals(
    data: ScatteringData,
    s: ArrayLike,
    sigma: ArrayLike,
    y: ArrayLike,
    t: ArrayLike,
) -> Tuple[ArrayLike, ArrayLike]:
    """
    Residuals of p_y = p_zz - p_zetazeta and p_t = 4(p_zzz + p_zetazetazeta).

    Both are evaluated from the closed-form derivatives. For valid components
    they vanish up to rounding; a component whose omega differs from
    4(a^3 + b^3) leaves an r_t equal to the mismatch times that component.
    The t-identity carries a plus sign.

    Returns:
        Tuple (r_y, r_t)
    """
    d = partial(kernel_derivative, data, s, sigma, y, t)
    r_y = d(dy=1) - (d(ds=2) - d(dsigma=2))
    r_t = d(dt=1) - 4.0 * (d(ds=3) + d(dsigma=3))
    return r_y, r_t


def x_constraint_residual(
    data: ScatteringData,
    z: ArrayLike,
    zeta: ArrayLike,
    x: ArrayLike,
    y: ArrayLike,
    t: ArrayLike,
    h: float = 1e-6,
) -> ArrayLike:
    """
    Residual of p_x = p_z + p_zeta, with p_x taken by central difference.

    The semi-additive form satisfies this identity for every kernel; the
    finite difference in x checks it without assuming the form.
    """
    p_x = (
        eval_kernel(data, z + x + h, zeta + x + h, y, t)
        - eval_kernel(data, z + x - h, zeta + x - h, y, t)
    ) / (2.0 * h)
    p_z = kernel_derivative(data, z + x, zeta + x, y, t, ds=1)
    p_zeta = kernel_derivative(data, z + x, zeta + x, y, t, dsigma=1)
    return p_x - (p_z + p_zeta)


def phase(c: SolitonComponent, x: ArrayLike, y: ArrayLike, t: ArrayLike) -> ArrayLike:
    """Theta = ((a + b) x + lam y + omega t) / 2, plus half the log weight."""
    theta = 0.5 * ((c.a + c.b) * x + c.lam * y + c.omega * t)
    if c.weight != 1.0:
        with np.errstate(divide="ignore"):
            theta = theta + 0.5 * np.log(c.weight)
    return theta


def analytic_soliton_g(
    c: SolitonComponent, x: ArrayLike, y: ArrayLike, t: ArrayLike
) -> ArrayLike:
    """
    Closed-form g(0, 0; x, y, t) for a single component.

    g = -(a + b) e^{2 Theta} / (1 + e^{2 Theta}), evaluated as
    -(a + b) / (1 + e^{-2 Theta}) so that neither tail overflows.
    """
    theta = phase(c, x, y, t)
    with np.errstate(over="ignore"):
        return -(c.a + c.b) / (1.0 + np.exp(-2.0 * theta))


def analytic_soliton_u(
    c: SolitonComponent, x: ArrayLike, y: ArrayLike, t: ArrayLike
) -> ArrayLike:
    """Closed-form u = d/dx g = -(a + b)^2 sech^2(Theta) / 4."""
    theta = phase(c, x, y, t)
    with np.errstate(over="ignore"):
        return -0.25 * (c.a + c.b) ** 2 / np.cosh(theta) ** 2


def analytic_soliton_tau(
    c: SolitonComponent, x: ArrayLike, y: ArrayLike, t: ArrayLike
) -> ArrayLike:
    """
    Closed-form tau = det(id - P) = 1 + e^{2 Theta} for a single component.

    The rank-one kernel has the single eigenvalue -e^{2 Theta}.
    """
    theta = phase(c, x, y, t)
    with np.errstate(over="ignore"):
        return 1.0 + np.exp(2.0 * theta)


def analytic_soliton_log_tau(
    c: SolitonComponent, x: ArrayLike, y: ArrayLike, t: ArrayLike
) -> ArrayLike:
    """log tau without overflow: log1p(e^{2 Theta}) = logaddexp(0, 2 Theta)."""
    return np.logaddexp(0.0, 2.0 * phase(c, x, y, t))


def _soliton_matrices(
    data: ScatteringData, x: ArrayLike, y: ArrayLike, t: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    # E[..., i, j] = w_j (a_j + b_j) e^{(a_j + b_i) x' + lam_j y' + omega_j t} / (a_j + b_i)
    xs = np.asarray(x, dtype=float) - data.xshift
    ys = np.asarray(y, dtype=float) - data.yshift
    xs, ys, ts = np.broadcast_arrays(xs, ys, np.asarray(t, dtype=float))
    a = np.array([c.a for c in data.components])
    b = np.array([c.b for c in data.components])
    lam = np.array([c.lam for c in data.components])
    omega = np.array([c.omega for c in data.components])
    w = np.array([c.weight for c in data.components])
    rates = b[:, None] + a[None, :]
    exponent = (
        rates * xs[..., None, None]
        + lam[None, :] * ys[..., None, None]
        + omega[None, :] * ts[..., None, None]
    )
    with np.errstate(over="ignore"):
        E = (w * (a + b))[None, :] / rates * np.exp(exponent)
    return E, rates


def multisoliton_log_tau(
    data: ScatteringData, x: ArrayLike, y: ArrayLike, t: ArrayLike
) -> np.ndarray:
    """
    log tau of the exact N-soliton solution on the half-line.

    The kernel is separable with N terms, so det(id - P) reduces to the
    N x N determinant det(I + E) with
    E_ij = w_j (a_j + b_j) e^{(a_j + b_i) x + lam_j y + omega_j t} / (a_j + b_i),
    taken at the shifted coordinates. For one component this is log(1 + e^{2 Theta}).

    Returns:
        Array of the broadcast shape of x, y and t
    """
    E, _ = _soliton_matrices(data, x, y, t)
    sign, logdet = np.linalg.slogdet(np.eye(len(data)) + E)
    return np.where(sign > 0, logdet, np.nan)


def multisoliton_fields(
    data: ScatteringData, x: ArrayLike, y: ArrayLike, t: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact g = -d/dx log tau and u = -d^2/dx^2 log tau of the N-soliton solution.

    With C = I + E and D_ij = a_j + b_i, the x-derivatives of E are D E and
    D^2 E entrywise, and

        d/dx log tau   = tr(C^-1 D E)
        d2/dx2 log tau = tr(C^-1 D^2 E) - tr(C^-1 D E C^-1 D E)

    Returns:
        Tuple (g, u), arrays of the broadcast shape of x, y and t
    """
    E, rates = _soliton_matrices(data, x, y, t)
    C = np.eye(len(data)) + E
    Ex = rates * E
    A = np.linalg.solve(C, Ex)
    B = np.linalg.solve(C, rates * Ex)
    first = np.trace(A, axis1=-2, axis2=-1)
    second = np.trace(B, axis1=-2, axis2=-1) - np.einsum("...ij,...ji->...", A, A)
    return -first, -second
