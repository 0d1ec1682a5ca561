"""Dense Cl(3) multivector arithmetic and grid-based geometric calculus.

The algebra is generated by three orthonormal Euclidean vectors
``e1, e2, e3`` with ``e_i e_i = 1`` and ``e_i e_j = -e_j e_i``.  Elements
are stored densely as 8 complex coefficients over the blade basis

    ``{1, e1, e2, e3, e12, e13, e23, e123}``

(the reciprocal basis coincides with the basis, so index placement never
matters here).  Coefficients are complex throughout: the vectorized
Cole-Hopf transform stretches gradients by the imaginary constant
``-i b^2``.

Blades are encoded as bitmasks (bit ``j`` set means ``e_{j+1}`` is a
factor); the geometric product of blades is then an XOR of masks with a
sign from counting transpositions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fields import GridSpec, Norms, ScalarField, derivative, laplacian, norms

__all__ = [
    "BLADE_NAMES",
    "Multivector",
    "MultivectorField",
    "StretchSpec",
    "geometric_product",
    "scalar_product",
    "wedge",
    "contraction",
    "grade",
    "gradient",
    "divergence",
    "grad_wedge",
    "stretched_gradient",
    "check_prop_identities",
    "linearization_cancellation",
]

BLADE_NAMES = ("1", "e1", "e2", "e3", "e12", "e13", "e23", "e123")
_INDEX_TO_MASK = (0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)
_MASK_TO_INDEX = {m: i for i, m in enumerate(_INDEX_TO_MASK)}
GRADES = tuple(bin(m).count("1") for m in _INDEX_TO_MASK)


def _reorder_sign(a: int, b: int) -> int:
    """Sign from reordering the blade product ``e_A e_B`` into canonical form."""
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return 1 - 2 * (swaps & 1)


def _build_tables():
    target = np.zeros((8, 8), dtype=np.intp)
    sign = np.zeros((8, 8), dtype=np.float64)
    for i, mi in enumerate(_INDEX_TO_MASK):
        for j, mj in enumerate(_INDEX_TO_MASK):
            target[i, j] = _MASK_TO_INDEX[mi ^ mj]
            sign[i, j] = _reorder_sign(mi, mj)
    return target, sign


_TARGET, _SIGN = _build_tables()
# grade-selection masks for the derived products
_WEDGE_KEEP = np.zeros((8, 8), dtype=bool)
_CONTRACT_KEEP = np.zeros((8, 8), dtype=bool)
for _i in range(8):
    for _j in range(8):
        _gi, _gj = GRADES[_i], GRADES[_j]
        _gt = GRADES[_TARGET[_i, _j]]
        _WEDGE_KEEP[_i, _j] = _gt == _gi + _gj
        # Hestenes contraction: scalars contract to zero by convention
        _CONTRACT_KEEP[_i, _j] = _gi > 0 and _gj > 0 and _gt == abs(_gi - _gj)


def _product(a: np.ndarray, b: np.ndarray, keep: np.ndarray | None = None) -> np.ndarray:
    """Blade-table product of coefficient stacks shaped ``(8, ...)``."""
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.complex128)
    for i in range(8):
        for j in range(8):
            if keep is not None and not keep[i, j]:
                continue
            out[_TARGET[i, j]] += _SIGN[i, j] * a[i] * b[j]
    return out


@dataclass(frozen=True)
class Multivector:
    """A single Cl(3) element: 8 complex blade coefficients."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (8,):
            raise ValueError("a multivector has exactly 8 blade coefficients")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls) -> "Multivector":
        return cls(np.zeros(8))

    @classmethod
    def scalar(cls, value: complex) -> "Multivector":
        c = np.zeros(8, dtype=np.complex128)
        c[0] = value
        return cls(c)

    @classmethod
    def vector(cls, components: Sequence[complex]) -> "Multivector":
        c = np.zeros(8, dtype=np.complex128)
        c[1:4] = components
        return cls(c)

    @classmethod
    def basis(cls, name: str) -> "Multivector":
        c = np.zeros(8, dtype=np.complex128)
        c[BLADE_NAMES.index(name)] = 1.0
        return cls(c)

    def __add__(self, other: "Multivector") -> "Multivector":
        return Multivector(self.coeffs + other.coeffs)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return Multivector(self.coeffs - other.coeffs)

    def __neg__(self) -> "Multivector":
        return Multivector(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        return Multivector(self.coeffs * other)

    def __rmul__(self, other):
        return Multivector(self.coeffs * other)

    def __getitem__(self, blade: str) -> complex:
        return complex(self.coeffs[BLADE_NAMES.index(blade)])

    def is_close(self, other: "Multivector", tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)


def geometric_product(A: Multivector, B: Multivector) -> Multivector:
    """Associative bilinear Clifford product via the blade table."""
    return Multivector(_product(A.coeffs, B.coeffs))


def grade(A: Multivector, k: int) -> Multivector:
    """Grade projection ``<A>_k``."""
    c = A.coeffs.copy()
    for idx, g in enumerate(GRADES):
        if g != k:
            c[idx] = 0.0
    return Multivector(c)


def scalar_product(A: Multivector, B: Multivector) -> complex:
    """Symmetric scalar product ``A * B = <AB>_0``."""
    return complex(_product(A.coeffs, B.coeffs)[0])


def wedge(A: Multivector, B: Multivector) -> Multivector:
    """Grade-raising exterior product: keeps the grade ``r + s`` parts."""
    return Multivector(_product(A.coeffs, B.coeffs, _WEDGE_KEEP))


def contraction(A: Multivector, B: Multivector) -> Multivector:
    """Hestenes contraction: grade ``|r - s|`` parts; scalars contract to 0."""
    return Multivector(_product(A.coeffs, B.coeffs, _CONTRACT_KEEP))


@dataclass(frozen=True)
class MultivectorField:
    """A multivector attached to every point of a grid.

    ``coeffs`` is shaped ``(8,) + grid.shape``; entry ``coeffs[i]`` holds the
    blade-``i`` coefficient field.  Vector fields (velocities, gradients)
    populate indices 1..3 only.
    """

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (8,) + self.grid.shape:
            raise ValueError(
                f"coefficient stack shape {c.shape} does not match (8,) + {self.grid.shape}"
            )
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValueError("multivector field contains non-finite entries")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, grid: GridSpec) -> "MultivectorField":
        return cls(grid, np.zeros((8,) + grid.shape))

    @classmethod
    def from_vector_components(cls, grid: GridSpec, components: Sequence[np.ndarray]) -> "MultivectorField":
        """Build a vector field from per-axis component arrays.

        In one dimension a single component is accepted and placed on ``e1``.
        """
        c = np.zeros((8,) + grid.shape, dtype=np.complex128)
        for axis, comp in enumerate(components):
            c[1 + axis] = comp
        return cls(grid, c)

    def component(self, blade: str) -> ScalarField:
        return ScalarField(self.grid, self.coeffs[BLADE_NAMES.index(blade)])

    def vector_components(self) -> tuple[np.ndarray, ...]:
        return tuple(self.coeffs[1 + axis] for axis in range(self.grid.dim))

    def at(self, *index: int) -> Multivector:
        return Multivector(self.coeffs[(slice(None),) + index])

    def __add__(self, other: "MultivectorField") -> "MultivectorField":
        if self.grid != other.grid:
            raise ValueError("grid mismatch")
        return MultivectorField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "MultivectorField") -> "MultivectorField":
        if self.grid != other.grid:
            raise ValueError("grid mismatch")
        return MultivectorField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, MultivectorField):
            return MultivectorField(self.grid, _product(self.coeffs, other.coeffs))
        return MultivectorField(self.grid, self.coeffs * other)

    __rmul__ = __mul__

    def conj(self) -> "MultivectorField":
        return MultivectorField(self.grid, np.conj(self.coeffs))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))


# -- geometric calculus on grids -------------------------------------------

def gradient(f: ScalarField, scheme: str = "spectral") -> MultivectorField:
    r"""Geometric gradient :math:`\nabla f = e^j \partial_{x_j} f`.

    On a 1-D grid only the ``e1`` component is populated.
    """
    comps = [derivative(f, axis, scheme).values for axis in range(f.grid.dim)]
    return MultivectorField.from_vector_components(f.grid, comps)


def divergence(w: MultivectorField, scheme: str = "spectral") -> ScalarField:
    r"""Contraction part of the geometric derivative of a vector field."""
    total = np.zeros(w.grid.shape, dtype=np.complex128)
    for axis, comp in enumerate(w.vector_components()):
        total += derivative(ScalarField(w.grid, comp), axis, scheme).values
    return ScalarField(w.grid, total)


def grad_wedge(w: MultivectorField, scheme: str = "spectral") -> MultivectorField:
    r"""Wedge part :math:`\nabla \wedge w` of the derivative of a vector field.

    Returns a bivector field with ``e_ij`` coefficient
    :math:`\partial_{x_i} w_j - \partial_{x_j} w_i`; it vanishes exactly when
    the field is irrotational.
    """
    grid = w.grid
    out = np.zeros((8,) + grid.shape, dtype=np.complex128)
    pair_to_blade = {(0, 1): 4, (0, 2): 5, (1, 2): 6}
    comps = w.vector_components()
    for (i, j), blade in pair_to_blade.items():
        if max(i, j) >= grid.dim:
            continue
        di_wj = derivative(ScalarField(grid, comps[j]), i, scheme).values
        dj_wi = derivative(ScalarField(grid, comps[i]), j, scheme).values
        out[blade] = di_wj - dj_wi
    return MultivectorField(grid, out)


@dataclass(frozen=True)
class StretchSpec:
    """Spatially constant stretch coefficients for the anisotropic gradient."""

    c: tuple[complex, complex, complex]

    def __post_init__(self):
        if len(self.c) != 3:
            raise ValueError("stretch spec carries exactly 3 coefficients")
        object.__setattr__(self, "c", tuple(complex(v) for v in self.c))

    @classmethod
    def isotropic(cls, lam: complex) -> "StretchSpec":
        return cls((lam, lam, lam))


def stretched_gradient(f: ScalarField, s: StretchSpec, scheme: str = "spectral") -> MultivectorField:
    r"""Stretched gradient :math:`C(\nabla) f = c_k e^k \partial_{x_k} f`.

    Only constant stretch vectors are supported; the commutation identities
    below are false otherwise.
    """
    comps = [
        s.c[axis] * derivative(f, axis, scheme).values for axis in range(f.grid.dim)
    ]
    return MultivectorField.from_vector_components(f.grid, comps)


def _vector_norms(coeff_stack: np.ndarray, grid: GridSpec) -> Norms:
    worst = Norms(0.0, 0.0)
    for comp in coeff_stack:
        n = norms(ScalarField(grid, comp))
        if n.l_inf > worst.l_inf:
            worst = Norms(n.l_inf, max(n.l2, worst.l2))
        else:
            worst = Norms(worst.l_inf, max(n.l2, worst.l2))
    return worst


def check_prop_identities(
    f: ScalarField,
    s: StretchSpec,
    scheme: str = "spectral",
    aux: ScalarField | None = None,
) -> dict[str, Norms]:
    r"""Discrete residuals of the stretched-gradient identities.

    Four identities are evaluated on the test field ``f``:

    ``time_commutation``
        :math:`[\partial_t, C(\nabla)] = 0` on the separable series
        ``f(x) cos(t)`` with a centred time difference.
    ``laplacian_commutation``
        :math:`[\nabla^2, C(\nabla)] f = 0`, componentwise.
    ``directional_symmetry``
        :math:`(C(\nabla)f \cdot \nabla) g = (\nabla f \cdot C(\nabla)) g`
        for an auxiliary field ``g`` (a third-of-period translate of ``f``
        unless supplied).
    ``convective_gradient``
        :math:`(w \cdot \nabla) w = \tfrac12 \nabla (w \cdot w)` with
        ``w = C(\nabla) f``.

    Notes
    -----
    The convective identity requires ``w`` to be irrotational,
    :math:`\partial_{x_i} w_j = \partial_{x_j} w_i`.  With
    ``w_j = c_j \partial_j f`` this holds exactly when
    ``(c_i - c_j) \partial_i \partial_j f = 0`` for every pair -- e.g. for
    isotropic stretches (the Cole-Hopf case), or for additively separable
    ``f``.  For anisotropic stretches on fields with mixed second
    derivatives the residual is genuinely nonzero, and this function
    reports it honestly.
    """
    grid = f.grid
    c = s.c

    # 1. commutation with the time derivative on f(x) * cos(t)
    h = 0.1
    g_vals = [np.cos(m * h) for m in range(3)]
    dt_then_stretch = stretched_gradient(
        ScalarField(grid, f.values * ((g_vals[2] - g_vals[0]) / (2 * h))), s, scheme
    )
    series = [stretched_gradient(ScalarField(grid, f.values * g), s, scheme) for g in g_vals]
    stretch_then_dt = MultivectorField(
        grid, (series[2].coeffs - series[0].coeffs) / (2 * h)
    )
    r_time = _vector_norms((dt_then_stretch - stretch_then_dt).coeffs[1:4], grid)

    # 2. commutation with the Laplacian
    lap_then_stretch = stretched_gradient(laplacian(f, scheme), s, scheme)
    w = stretched_gradient(f, s, scheme)
    stretch_then_lap = MultivectorField(
        grid,
        np.stack(
            [laplacian(ScalarField(grid, comp), scheme).values for comp in w.coeffs]
        ),
    )
    r_lap = _vector_norms((lap_then_stretch - stretch_then_lap).coeffs[1:4], grid)

    # 3. directional-derivative symmetry on an auxiliary field
    if aux is None:
        aux = ScalarField(grid, np.roll(f.values, grid.n // 3, axis=0))
    lhs = np.zeros(grid.shape, dtype=np.complex128)
    rhs = np.zeros(grid.shape, dtype=np.complex128)
    for axis in range(grid.dim):
        df = derivative(f, axis, scheme).values
        dg = derivative(aux, axis, scheme).values
        lhs += (c[axis] * df) * dg
        rhs += df * (c[axis] * dg)
    r_sym = norms(ScalarField(grid, lhs - rhs))

    # 4. convective identity (w . grad) w = 1/2 grad(w . w)
    wc = w.vector_components()
    w_sq = np.zeros(grid.shape, dtype=np.complex128)
    for comp in wc:
        w_sq += comp * comp
    half_grad = [
        0.5 * derivative(ScalarField(grid, w_sq), axis, scheme).values
        for axis in range(grid.dim)
    ]
    convective = []
    for j in range(grid.dim):
        acc = np.zeros(grid.shape, dtype=np.complex128)
        for k in range(grid.dim):
            acc += wc[k] * derivative(ScalarField(grid, wc[j]), k, scheme).values
        convective.append(acc)
    r_conv = _vector_norms(
        np.stack([convective[j] - half_grad[j] for j in range(grid.dim)]), grid
    )

    return {
        "time_commutation": r_time,
        "laplacian_commutation": r_lap,
        "directional_symmetry": r_sym,
        "convective_gradient": r_conv,
    }


def linearization_cancellation(
    F: ScalarField, b: float, lam: complex | None = None, scheme: str = "spectral"
) -> Norms:
    r"""Residual of the exact-linearization identity of the Cole-Hopf proof.

    Evaluates, with ``w = \nabla \log F`` and the isotropic stretch
    ``C(\nabla) = lam \nabla``,

    .. math::

        \nabla (C(\nabla) \log F)^2 + i b^2\, C(\nabla) (\nabla \log F)^2

    term by term.  For ``lam`` solving :math:`\lambda^2 + i b^2 \lambda = 0`
    (i.e. ``lam = -i b^2``) the two terms cancel identically and the
    discrete residual sits at spectral round-off.
    """
    if lam is None:
        lam = -1j * b**2
    grid = F.grid
    mag = np.abs(F.values)
    if mag.min() <= 0:
        raise ValueError("log F undefined: F has a zero node")
    logF = ScalarField(grid, np.log(F.values.astype(np.complex128)))

    grads = [derivative(logF, axis, scheme).values for axis in range(grid.dim)]
    stretched_sq = np.zeros(grid.shape, dtype=np.complex128)
    plain_sq = np.zeros(grid.shape, dtype=np.complex128)
    for g in grads:
        sg = lam * g
        stretched_sq += sg * sg
        plain_sq += g * g

    residual_comps = []
    for axis in range(grid.dim):
        term1 = derivative(ScalarField(grid, stretched_sq), axis, scheme).values
        term2 = 1j * b**2 * lam * derivative(ScalarField(grid, plain_sq), axis, scheme).values
        residual_comps.append(term1 + term2)
    return _vector_norms(np.stack(residual_comps), grid)
