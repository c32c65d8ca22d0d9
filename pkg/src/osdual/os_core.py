"""Reflection-positive data on finite-dimensional spaces.

An :class:`OsSystem` bundles an ambient Gram matrix ``G`` (the inner product
of ``H`` in a chosen basis), a reflection ``J``, a basis ``S`` of the positive
subspace ``K0`` and a one-parameter family ``U(t)``.  From it we build the
quotient ``K = K0 / N`` of ``K0`` by the null vectors of ``<v, J v>``, push
operators down to ``K`` and recover the positive generator of the induced
semigroup.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.linalg import expm

from .errors import (
    InconsistentSamplesError,
    InvarianceViolation,
    MissingSampleError,
    NonContractiveError,
    NonSelfAdjointError,
    NotPositiveError,
    RelationViolation,
)
from .numerics import DEFAULT_PSD_TOL, certify_psd, eigendecompose_hermitian

NULL_RTOL = 1e-12
AXIOM_TOL = 1e-8
INVARIANCE_TOL = 1e-10
LOG_CAP = 1e-14


def _rel(residual, scale):
    return float(residual) / max(1.0, float(scale))


@dataclass(frozen=True)
class OsSystem:
    """Finite-dimensional reflection-positivity data.

    Parameters
    ----------
    ambient_gram : (n, n) array
        Inner product of the ambient space on the chosen basis.
    reflection : (n, n) array
        The involution ``J``; must be unitary for ``ambient_gram``.
    subspace : (n, k) array
        Columns span ``K0``.
    generator : (n, n) array, optional
        ``X`` with ``U(t) = expm(t X)``.
    samples : mapping of float to (n, n) arrays, optional
        ``U(t)`` at given times.  If a generator is also supplied the two
        are checked against each other.
    """

    ambient_gram: np.ndarray
    reflection: np.ndarray
    subspace: np.ndarray
    generator: np.ndarray | None = None
    samples: Mapping[float, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.ambient_gram, dtype=complex)
        j = np.asarray(self.reflection, dtype=complex)
        s = np.asarray(self.subspace, dtype=complex)
        if s.ndim == 1:
            s = s[:, None]
        n = g.shape[0]
        if g.shape != (n, n) or j.shape != (n, n) or s.shape[0] != n:
            raise ValueError("inconsistent dimensions in OS data")
        if not certify_psd(g).is_psd:
            raise NotPositiveError("ambient Gram is not positive", *_lowest(g))
        scale = max(1.0, np.linalg.norm(g))
        if np.linalg.norm(j @ j - np.eye(n)) > 1e-10 * max(1.0, np.linalg.norm(j)) ** 2:
            raise ValueError("reflection does not square to the identity")
        if np.linalg.norm(j.conj().T @ g @ j - g) > 1e-10 * scale * max(1.0, np.linalg.norm(j)) ** 2:
            raise ValueError("reflection is not unitary for the ambient inner product")
        if s.shape[1] and np.linalg.matrix_rank(s) < s.shape[1]:
            raise ValueError("subspace columns are linearly dependent")
        object.__setattr__(self, "ambient_gram", g)
        object.__setattr__(self, "reflection", j)
        object.__setattr__(self, "subspace", s)
        samples = {float(t): np.asarray(u, dtype=complex) for t, u in dict(self.samples).items()}
        object.__setattr__(self, "samples", samples)
        if self.generator is not None:
            x = np.asarray(self.generator, dtype=complex)
            object.__setattr__(self, "generator", x)
            for t, u in samples.items():
                err = np.linalg.norm(expm(t * x) - u)
                if err > 1e-8 * max(1.0, np.linalg.norm(u)):
                    raise InconsistentSamplesError(
                        f"sample at t={t} disagrees with the generator (residual {err:.3e})"
                    )
        elif not samples:
            raise ValueError("need a generator or sampled semigroup matrices")

    @property
    def dim(self):
        return self.ambient_gram.shape[0]

    def U(self, t: float) -> np.ndarray:
        if self.generator is not None:
            return expm(t * self.generator)
        for ts, u in self.samples.items():
            if abs(ts - t) <= 1e-12 * max(1.0, abs(t)):
                return u
        raise MissingSampleError(f"U({t}) is not available", t=t)

    def j_gram(self):
        """``<u, J v>`` on ``K0`` coordinates."""
        s = self.subspace
        m = s.conj().T @ self.ambient_gram @ self.reflection @ s
        return 0.5 * (m + m.conj().T)

    def k0_gram(self):
        s = self.subspace
        m = s.conj().T @ self.ambient_gram @ s
        return 0.5 * (m + m.conj().T)

    def k0_projector(self):
        """Orthogonal projection onto ``K0`` for the ambient inner product."""
        s = self.subspace
        return s @ np.linalg.solve(self.k0_gram(), s.conj().T @ self.ambient_gram)

    def adjoint(self, a):
        """Adjoint of ``a`` for the ambient inner product: ``G^-1 a^H G``."""
        g = self.ambient_gram
        return np.linalg.solve(g, a.conj().T @ g)


def _lowest(m):
    evals, evecs = eigendecompose_hermitian(0.5 * (m + np.conj(m).T))
    return evals[0], evecs[:, 0]


@dataclass(frozen=True)
class AxiomReport:
    times: list
    reflection_residuals: list
    invariance_residuals: list
    positivity: object
    tolerance: float = AXIOM_TOL

    @property
    def reflection_ok(self):
        return all(r <= self.tolerance for r in self.reflection_residuals)

    @property
    def invariance_ok(self):
        return all(r <= self.tolerance for r in self.invariance_residuals)

    @property
    def passed(self):
        return self.reflection_ok and self.invariance_ok and self.positivity.is_psd


def check_axioms(system: OsSystem, sample_times, tolerance: float = AXIOM_TOL) -> AxiomReport:
    """Residuals of ``J U(t) = U(-t) J``, positivity of ``P0 J P0`` and ``U(t) K0 ⊂ K0``.

    Positivity of ``P0 J P0`` as an operator is equivalent to positivity of
    the ``J``-form on ``K0`` coordinates, which is what gets certified.
    """
    times = [float(t) for t in sample_times]
    if any(t < 0 or not np.isfinite(t) for t in times):
        raise ValueError("sample times must be finite and nonnegative")
    j = system.reflection
    p0 = system.k0_projector()
    refl, inv = [], []
    for t in times:
        u, u_minus = system.U(t), system.U(-t)
        refl.append(_rel(np.linalg.norm(j @ u - u_minus @ j), np.linalg.norm(u)))
        inv.append(_rel(np.linalg.norm(p0 @ u @ p0 - u @ p0), np.linalg.norm(u)))
    jg = system.j_gram()
    scale = max(np.abs(jg).max(initial=0.0), np.abs(system.k0_gram()).max(initial=0.0))
    positivity = certify_psd(jg / scale if scale > 0 else jg)
    return AxiomReport(times, refl, inv, positivity, tolerance)


def semigroup_residual(system: OsSystem, pairs) -> float:
    """Largest relative ``||U(s) U(t) - U(s + t)||`` over the given ``(s, t)`` pairs."""
    worst = 0.0
    for s, t in pairs:
        lhs = system.U(s) @ system.U(t)
        worst = max(worst, _rel(np.linalg.norm(lhs - system.U(s + t)), np.linalg.norm(lhs)))
    return worst


@dataclass(frozen=True)
class QuotientSpace:
    """``K = K0 / N`` in coordinates.

    ``quotient_basis`` maps ``K0`` coordinates to ``K`` coordinates and
    ``lift`` is a right inverse whose columns span a complement of ``N``.
    ``gram`` is the positive definite ``J``-form on ``K`` coordinates.
    """

    j_gram: np.ndarray
    null_dim: int
    quotient_basis: np.ndarray
    lift: np.ndarray
    gram: np.ndarray
    null_basis: np.ndarray
    null_tolerance: float
    beta_norm: float

    @property
    def dim(self):
        return self.quotient_basis.shape[0]


def build_quotient(system: OsSystem, tolerance: float = DEFAULT_PSD_TOL, null_rtol: float = NULL_RTOL) -> QuotientSpace:
    """Divide ``K0`` by the null space of the ``J``-form.

    Raises
    ------
    NotPositiveError
        If the ``J``-form has a genuinely negative direction; the error
        carries the most negative eigenvalue and its eigenvector.
    """
    jg = system.j_gram()
    k = jg.shape[0]
    evals, evecs = eigendecompose_hermitian(jg)
    lam_max = float(evals[-1]) if k else 0.0
    if k and evals[0] < -tolerance * max(1.0, lam_max):
        raise NotPositiveError(
            f"J-form on K0 is indefinite (lowest eigenvalue {evals[0]:.3e})", evals[0], evecs[:, 0]
        )
    # Null directions are detected on the Jacobi-scaled form so that the
    # test does not depend on how the K0 basis vectors are normalized.
    diag = np.diag(jg).real if k else np.zeros(0)
    live = diag > null_rtol * diag.max(initial=0.0)
    root = np.where(live, np.sqrt(np.where(live, diag, 1.0)), 1.0)
    s_evals, s_evecs = eigendecompose_hermitian(jg / np.outer(root, root)) if k else (evals, evecs)
    s_max = float(s_evals[-1]) if k else 0.0
    cutoff = null_rtol * s_max if s_max > 0 else 0.0
    null = s_evals <= cutoff
    null_dim = int(np.count_nonzero(null))
    if null_dim == 0:
        basis = np.eye(k, dtype=complex)
        lift = np.eye(k, dtype=complex)
    else:
        lift = s_evecs[:, ~null] / root[:, None]
        basis = s_evecs[:, ~null].conj().T * root[None, :]
    null_basis = s_evecs[:, null] / root[:, None]
    gram = lift.conj().T @ jg @ lift
    gram = 0.5 * (gram + gram.conj().T)
    # beta is a contraction: <v, J v> <= <v, v> on K0.
    kg = system.k0_gram()
    beta_norm = 0.0
    if k:
        ratio = np.linalg.eigvals(np.linalg.solve(kg, jg)).real
        beta_norm = float(np.sqrt(max(ratio.max(), 0.0)))
    return QuotientSpace(jg, null_dim, basis, lift, gram, null_basis, cutoff, beta_norm)


@dataclass(frozen=True)
class InducedOperator:
    matrix: np.ndarray
    j_norm: float
    bound: float
    invariance_residual: float
    relation_residual: float
    null_leak: float
    hypothesis_residual: float

    @property
    def within_bound(self):
        return self.j_norm <= self.bound + 1e-8

    @property
    def bound_hypothesis_holds(self):
        """Whether ``(gamma^-1)* gamma`` maps ``K0`` into itself.

        The spectral-radius estimate is derived through a Cauchy-Schwarz
        step that needs this; unitary ``gamma`` always satisfies it.
        """
        return self.hypothesis_residual <= 1e-8


def j_operator_norm(quotient: QuotientSpace, a) -> float:
    """Operator norm of ``a`` on ``K`` for the ``J``-inner product."""
    if quotient.dim == 0:
        return 0.0
    c = np.linalg.cholesky(quotient.gram)
    m = c.conj().T @ a @ np.linalg.inv(c.conj().T)
    return float(np.linalg.norm(m, 2))


def restrict_to_k0(system: OsSystem, gamma, tol: float = INVARIANCE_TOL):
    """Matrix of ``gamma`` on ``K0`` coordinates and the relative projection residual."""
    s = system.subspace
    gs = gamma @ s
    coeffs = np.linalg.solve(system.k0_gram(), s.conj().T @ system.ambient_gram @ gs)
    resid = _rel(np.linalg.norm(gs - s @ coeffs), np.linalg.norm(gs))
    if resid > tol:
        raise InvarianceViolation(f"gamma does not preserve K0 (projection residual {resid:.3e})", residual=resid)
    return coeffs, resid


def induce_operator(system: OsSystem, quotient: QuotientSpace, gamma, relation: str = "j_twisted",
                    tol: float = INVARIANCE_TOL) -> InducedOperator:
    """Push ``gamma`` down to the quotient ``K``.

    ``relation`` is ``"j_twisted"`` (``J gamma = gamma^-1 J``) or
    ``"commutes_with_J"``.  The returned ``bound`` is the square root of the
    spectral radius of ``(gamma^-1)* gamma`` in the twisted case and of
    ``gamma* gamma`` in the commuting case.
    """
    gamma = np.asarray(gamma, dtype=complex)
    n = system.dim
    if gamma.shape != (n, n):
        raise ValueError("gamma has the wrong shape")
    if np.linalg.cond(gamma) > 1e12:
        raise ValueError("gamma is not invertible")
    gamma_inv = np.linalg.inv(gamma)
    j = system.reflection
    if relation == "j_twisted":
        rel = np.linalg.norm(j @ gamma - gamma_inv @ j)
        a = system.adjoint(gamma_inv) @ gamma
    elif relation == "commutes_with_J":
        rel = np.linalg.norm(j @ gamma - gamma @ j)
        a = system.adjoint(gamma) @ gamma
    else:
        raise ValueError(f"unknown relation {relation!r}")
    rel = _rel(rel, np.linalg.norm(gamma))
    if rel > tol:
        raise RelationViolation(f"{relation} relation fails (residual {rel:.3e})", residual=rel)
    coeffs, inv_resid = restrict_to_k0(system, gamma, tol)
    induced = quotient.quotient_basis @ coeffs @ quotient.lift
    leak = 0.0
    if quotient.null_dim:
        leak = float(np.linalg.norm(quotient.quotient_basis @ coeffs @ quotient.null_basis))
    bound = float(np.sqrt(np.max(np.abs(np.linalg.eigvals(a)))))
    s = system.subspace
    a_s = a @ s
    p_a_s = s @ np.linalg.solve(system.k0_gram(), s.conj().T @ system.ambient_gram @ a_s)
    hyp = _rel(np.linalg.norm(a_s - p_a_s), np.linalg.norm(a_s))
    return InducedOperator(induced, j_operator_norm(quotient, induced), bound, inv_resid, rel, leak, hyp)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    times: tuple
    disagreement: float
    capped: bool

    @property
    def ground_state(self):
        return self.eigenvectors[:, 0]


def _hermitian_log_spectrum(quotient, u_tilde, t):
    """Eigenvalues and ``K``-coordinate eigenvectors of ``-log(u_tilde)/t``."""
    q = quotient.gram
    w, v = eigendecompose_hermitian(q)
    q_half = v @ np.diag(np.sqrt(w)) @ v.conj().T
    q_ihalf = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    sym = q_half @ u_tilde @ q_ihalf
    scale = max(1.0, np.linalg.norm(sym))
    if np.linalg.norm(sym - sym.conj().T) > 1e-8 * scale:
        raise NonSelfAdjointError("induced operator is not self-adjoint for the J-form")
    mu, vecs = eigendecompose_hermitian(0.5 * (sym + sym.conj().T))
    if mu[-1] > 1.0 + 1e-8:
        raise NonContractiveError(f"induced operator has eigenvalue {mu[-1]:.6g} > 1")
    capped = bool(np.any(mu < LOG_CAP))
    mu = np.clip(mu, LOG_CAP, None)
    energies = -np.log(mu) / t
    order = np.argsort(energies)
    return energies[order], (q_ihalf @ vecs)[:, order], capped


def induced_generator(system: OsSystem, quotient: QuotientSpace, times=(0.1, 0.2),
                      tol: float = 1e-6) -> SpectrumReport:
    """Spectrum of the positive generator ``H`` with ``U~(t) = exp(-t H)``.

    ``H`` is computed independently at each sample time through the
    eigendecomposition of the symmetrized induced operator; the results at
    different times must agree within ``tol``.
    """
    times = tuple(float(t) for t in times)
    if len(times) < 2 or len(set(times)) < 2 or min(times) <= 0:
        raise ValueError("need at least two distinct positive sample times")
    spectra = []
    capped = False
    for t in times:
        coeffs, _ = restrict_to_k0(system, system.U(t))
        u_tilde = quotient.quotient_basis @ coeffs @ quotient.lift
        e, vecs, cap = _hermitian_log_spectrum(quotient, u_tilde, t)
        capped |= cap
        spectra.append((e, vecs))
    if capped:
        warnings.warn("induced semigroup has eigenvalues below the log cap", RuntimeWarning, stacklevel=2)
    ref = spectra[0][0]
    dis = max(float(np.max(np.abs(e - ref) / np.maximum(1.0, np.abs(ref)))) for e, _ in spectra[1:])
    if dis > tol and not capped:
        raise InconsistentSamplesError(f"generator spectra disagree across times ({dis:.3e})", disagreement=dis)
    if ref[0] < -1e-8:
        raise NonContractiveError(f"generator has negative eigenvalue {ref[0]:.3e}")
    return SpectrumReport(ref, spectra[0][1], times, dis, capped)


# --------------------------------------------------------------------------
# Finite involutive measure spaces


@dataclass(frozen=True)
class PhillipsSubspace:
    fixed: tuple
    a_set: tuple
    b_set: tuple
    basis: np.ndarray
    j_gram: np.ndarray
    quotient_dim: int
    maximal: bool


def _check_involution(theta):
    theta = [int(i) for i in theta]
    n = len(theta)
    if sorted(theta) != list(range(n)) or any(theta[theta[i]] != i for i in range(n)):
        raise ValueError("theta is not an involutive permutation")
    return theta


def involution_j_gram(theta, masses, points):
    """``<1_p, J 1_q>`` for indicator functions of the listed points.

    ``J f = f o theta`` on ``L2`` of a weighted finite set.
    """
    m = np.zeros((len(points), len(points)))
    for a, p in enumerate(points):
        for b, q in enumerate(points):
            if theta[q] == p:
                m[a, b] = masses[p]
    return m


def phillips_max_subspace(theta, masses=None) -> PhillipsSubspace:
    """Maximal positive subspace ``L2(M0 ∪ A)`` for ``J f = f o theta``.

    Fixed points form ``M0``; from each two-cycle the smaller index goes to
    ``A`` and its partner to ``B``.
    """
    theta = _check_involution(theta)
    n = len(theta)
    masses = np.ones(n) if masses is None else np.asarray(masses, dtype=float)
    if masses.shape != (n,) or np.any(masses <= 0):
        raise ValueError("masses must be positive, one per point")
    if any(not np.isclose(masses[i], masses[theta[i]], rtol=1e-12) for i in range(n)):
        raise ValueError("masses must be theta-invariant for J to be unitary")
    fixed = tuple(i for i in range(n) if theta[i] == i)
    a_set = tuple(i for i in range(n) if theta[i] > i)
    b_set = tuple(theta[i] for i in a_set)
    points = sorted(fixed + a_set)
    basis = np.zeros((n, len(points)))
    basis[points, np.arange(len(points))] = 1.0
    jg = involution_j_gram(theta, masses, points)
    if not certify_psd(jg).is_psd:  # cannot happen for a well-formed involution
        raise NotPositiveError("indicator subspace is not positive", *_lowest(jg))
    maximal = all(_breaks_positivity(theta, masses, points, b) for b in b_set)
    return PhillipsSubspace(fixed, a_set, b_set, basis, jg, len(fixed), maximal)


def _breaks_positivity(theta, masses, points, extra):
    """Adding ``extra`` makes the form indefinite: ``f = 1_a - 1_extra`` is negative."""
    jg = involution_j_gram(theta, masses, sorted(points + [extra]))
    return not certify_psd(jg).is_psd


def brute_force_max_positive(theta, masses=None):
    """Largest indicator subsets on which ``J`` is positive, by enumeration.

    Only meant for small point sets; returns the maximal size and the list of
    subsets attaining it.
    """
    theta = _check_involution(theta)
    n = len(theta)
    masses = np.ones(n) if masses is None else np.asarray(masses, dtype=float)
    best, winners = -1, []
    for r in range(n, -1, -1):
        for subset in itertools.combinations(range(n), r):
            if certify_psd(involution_j_gram(theta, masses, list(subset)) if subset else np.zeros((1, 1))).is_psd:
                if r > best:
                    best, winners = r, []
                winners.append(subset)
        if best >= 0:
            break
    return best, winners


# --------------------------------------------------------------------------
# Serialization


def _decode(data):
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _encode(m):
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def system_from_json(text: str) -> OsSystem:
    """Parse ``{ambient_gram, reflection, subspace, semigroup: {kind, data}}``.

    Matrices are row-major nested lists of ``[re, im]`` pairs.  Sampled
    semigroups use ``data = [{"t": t, "matrix": ...}, ...]``.
    """
    doc = json.loads(text)
    semi = doc.get("semigroup", {})
    kind = semi.get("kind")
    generator, samples = None, {}
    if kind == "generator":
        generator = _decode(semi["data"])
    elif kind == "samples":
        samples = {float(item["t"]): _decode(item["matrix"]) for item in semi["data"]}
    else:
        raise ValueError(f"unknown semigroup kind {kind!r}")
    return OsSystem(_decode(doc["ambient_gram"]), _decode(doc["reflection"]), _decode(doc["subspace"]),
                    generator, samples)


def system_to_json(system: OsSystem) -> str:
    if system.generator is not None:
        semi = {"kind": "generator", "data": _encode(system.generator)}
    else:
        semi = {"kind": "samples",
                "data": [{"t": t, "matrix": _encode(u)} for t, u in sorted(system.samples.items())]}
    return json.dumps({
        "ambient_gram": _encode(system.ambient_gram),
        "reflection": _encode(system.reflection),
        "subspace": _encode(system.subspace),
        "semigroup": semi,
    })


# --------------------------------------------------------------------------
# Standard systems


def translation_system(n_points: int = 32, shift: int = 1) -> OsSystem:
    """Translations on a periodic half-integer grid with the flip ``x -> -x``.

    ``K0`` holds the functions supported on ``x > 0``.  The flip maps ``K0``
    onto its orthogonal complement, so the ``J``-form vanishes identically
    and translations do not preserve ``K0``.
    """
    if n_points % 2:
        raise ValueError("use an even number of grid points")
    n = n_points
    idx = np.arange(n)
    flip = np.zeros((n, n))
    flip[n - 1 - idx, idx] = 1.0
    step = np.roll(np.eye(n), shift, axis=0)
    half = np.eye(n)[:, n // 2:]
    samples = {float(k): np.linalg.matrix_power(step, k) if k >= 0 else np.linalg.matrix_power(step.T, -k)
               for k in range(-4, 5)}
    return OsSystem(np.eye(n), flip, half, samples=samples)


def mode_system(d, rates, mu: float = 2.0) -> OsSystem:
    """Two copies of ``C^k`` swapped by ``J`` with ``U(t)`` contracting ``K0``.

    The ambient Gram is ``[[mu D, D], [D, mu D]]`` with ``D`` the positive
    ``J``-Gram on ``K0`` (the first copy).  ``U(t)`` acts by ``exp(-t R)`` on
    the first copy and ``exp(t R)`` on the second, so ``J U(t) = U(-t) J``.
    ``rates`` is a vector (``R`` diagonal) or a Hermitian matrix; when ``R``
    commutes with ``D`` the induced generator has spectrum ``eig(R)``.
    """
    d = np.asarray(d, dtype=complex)
    k = d.shape[0]
    r = np.asarray(rates)
    r = np.diag(r.astype(float)) if r.ndim == 1 else r.astype(complex)
    if mu <= 1:
        raise ValueError("mu must exceed 1 for the ambient Gram to be definite")
    z = np.zeros((k, k))
    gram = np.block([[mu * d, d], [d, mu * d]])
    swap = np.block([[z, np.eye(k)], [np.eye(k), z]])
    gen = np.block([[-r, z], [z, r]])
    basis = np.vstack([np.eye(k), z])
    return OsSystem(gram, swap, basis, generator=gen)


def _random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_twisted_system(rng, dim: int = 8, kind: str = "unitary"):
    """Random OS system together with an operator ``gamma`` satisfying ``J gamma = gamma^-1 J``.

    ``kind="unitary"``: ``gamma`` is unitary for a random ambient Gram.  The
    space splits into two-dimensional blocks, where ``J`` swaps a pair of
    vectors and ``gamma`` rotates their phases in opposite directions, and
    one-dimensional blocks where both act by signs.  ``K0`` takes the first
    vector of each pair (a ``J``-null direction) and the one-dimensional
    blocks on which ``J = +1``.

    ``kind="modes"``: the swap system of :func:`mode_system` with a random
    positive ``D`` and a rate matrix commuting with it; ``gamma = U(t)`` for
    a random ``t > 0``.

    Returns ``(system, gamma)``.
    """
    if kind == "unitary":
        n_pairs = int(rng.integers(1, dim // 2))
        n_single = dim - 2 * n_pairs
        j0 = np.zeros((dim, dim), dtype=complex)
        u0 = np.zeros((dim, dim), dtype=complex)
        k0 = []
        for p in range(n_pairs):
            a, b = 2 * p, 2 * p + 1
            j0[a, b] = j0[b, a] = 1.0
            phase = np.exp(1j * rng.uniform(0.1, np.pi - 0.1))
            u0[a, a], u0[b, b] = phase, np.conj(phase)
            k0.append(a)
        signs = rng.choice([-1.0, 1.0], size=(n_single, 2))
        signs[0, 0] = 1.0  # keep the quotient nontrivial
        for i in range(n_single):
            c = 2 * n_pairs + i
            j0[c, c], u0[c, c] = signs[i]
            if signs[i, 0] > 0:
                k0.append(c)
        w = _random_unitary(rng, dim)
        t = w @ np.diag(rng.uniform(0.5, 2.0, dim)) @ _random_unitary(rng, dim)
        t_inv = np.linalg.inv(t)
        gram = t_inv.conj().T @ t_inv
        gram = 0.5 * (gram + gram.conj().T)
        refl = t @ w @ j0 @ w.conj().T @ t_inv
        gamma = t @ w @ u0 @ w.conj().T @ t_inv
        sub = t @ w[:, k0]
        samples = {0.0: np.eye(dim), 1.0: gamma, -1.0: np.linalg.inv(gamma)}
        return OsSystem(gram, refl, sub, samples=samples), gamma
    if kind == "modes":
        k = dim // 2
        v = _random_unitary(rng, k)
        d = v @ np.diag(rng.uniform(0.2, 2.0, k)) @ v.conj().T
        r = v @ np.diag(rng.uniform(0.1, 3.0, k)) @ v.conj().T
        system = mode_system(0.5 * (d + d.conj().T), 0.5 * (r + r.conj().T), mu=float(rng.uniform(1.5, 3.0)))
        return system, system.U(float(rng.uniform(0.05, 1.0)))
    raise ValueError(f"unknown kind {kind!r}")
