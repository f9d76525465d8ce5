"""Density-operator utilities for the quantum-profile and dephasing maps.

Joint states of ``n`` voters live on ``(m!)**n`` dimensions, with voter 0 as
the most significant tensor factor.  Only small joint states are supported
(``MAX_JOINT_DIM``); the constitution itself works on dephased profiles.

The unanimity and IIA checks implement the sharp/unsharp quantum analogues
of Arrow's axioms on pair probabilities ``p(a > b)``.
"""

from __future__ import annotations

import math

import numpy as np

from .distributions import (
    NORM_TOL,
    as_distribution,
    as_profile,
    m_from_size,
    pair_matrix,
    pair_probability,
)
from .exceptions import BoundError
from .preferences import pair_masks

__all__ = [
    "MAX_JOINT_DIM",
    "validate_density_matrix",
    "partial_trace_voter",
    "dephase",
    "pair_probability",
    "pair_projector",
    "check_quantum_unanimity",
    "check_qiia",
    "pure_state",
    "ghz_state",
]

MAX_JOINT_DIM = 4096
HERM_TOL = 1e-9
SHARP_TOL = 1e-9
UNSHARP_TOL = 1e-12


def validate_density_matrix(rho, dim=None):
    """Return ``rho`` as a complex array after checking Hermiticity, trace and PSD."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise BoundError(f"expected dimension {dim}, got {rho.shape[0]}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERM_TOL:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > NORM_TOL:
        raise ValueError(f"density matrix has trace {tr!r}")
    eig = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if eig.min() < -NORM_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {eig.min():.3g}")
    return rho


def partial_trace_voter(sigma, keep, m, n):
    """Reduced state of voter ``keep`` from an ``n``-voter joint state."""
    d = math.factorial(m)
    total = d**n
    if total > MAX_JOINT_DIM:
        raise BoundError(f"joint dimension {total} exceeds cap {MAX_JOINT_DIM}")
    if not 0 <= keep < n:
        raise ValueError(f"voter index {keep} out of range for n={n}")
    sigma = validate_density_matrix(sigma, total)
    left, right = d**keep, d ** (n - keep - 1)
    t = sigma.reshape(left, d, right, left, d, right)
    return np.einsum("aibajb->ij", t)


def dephase(rho):
    """Diagonal of ``rho`` in the preference basis, as a ranking distribution."""
    rho = validate_density_matrix(rho)
    diag = np.diagonal(rho)
    if np.max(np.abs(diag.imag), initial=0.0) > NORM_TOL:
        raise ValueError("diagonal has a non-negligible imaginary part")
    return as_distribution(diag.real)


def pair_projector(m, a, b):
    """Diagonal projector onto rankings with ``a`` above ``b``."""
    if a == b:
        raise ValueError("pair projector needs two distinct alternatives")
    return np.diag(pair_masks(m)[a, b].astype(float))


def pure_state(amplitudes):
    """``|psi><psi|`` for a (normalised on the fly) amplitude vector."""
    psi = np.asarray(amplitudes, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def ghz_state(index_a, index_b, m, k):
    """``(|a>^k + |b>^k)/sqrt(2)`` over ``k`` voters as a density matrix."""
    d = math.factorial(m)
    psi = np.zeros(d**k, dtype=complex)
    ia = sum(index_a * d**j for j in range(k))
    ib = sum(index_b * d**j for j in range(k))
    psi[ia] += 1.0
    psi[ib] += 1.0
    return pure_state(psi)


def _pair_tables(profile, rho_soc):
    profile = as_profile(profile)
    rho_soc = as_distribution(rho_soc)
    if profile.shape[1] != rho_soc.size:
        raise BoundError("profile and societal distribution disagree on m")
    voters = np.stack([pair_matrix(row) for row in profile])
    return voters, pair_matrix(rho_soc), m_from_size(rho_soc.size)


def check_quantum_unanimity(profile, rho_soc):
    """Sharp and unsharp unanimity of ``rho_soc`` with respect to ``profile``.

    Returns ``(sharp, unsharp)``.
    """
    voters, soc, m = _pair_tables(profile, rho_soc)
    sharp = unsharp = True
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            if np.all(voters[:, a, b] >= 1 - SHARP_TOL) and soc[a, b] < 1 - SHARP_TOL:
                sharp = False
            if np.all(voters[:, a, b] > UNSHARP_TOL) and not soc[a, b] > UNSHARP_TOL:
                unsharp = False
    return sharp, unsharp


def check_qiia(profile1, rho1, profile2, rho2):
    """Sharp and unsharp quantum IIA between two (profile, outcome) pairs.

    Only pairs ``(a, b)`` on which every voter's pair probabilities agree
    across the two profiles are tested; with none qualifying, both
    conditions hold vacuously.
    """
    v1, s1, m = _pair_tables(profile1, rho1)
    v2, s2, m2 = _pair_tables(profile2, rho2)
    if m != m2 or v1.shape != v2.shape:
        raise BoundError("QIIA inputs must share voters and candidates")
    sharp = unsharp = True
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            same = np.all(np.abs(v1[:, a, b] - v2[:, a, b]) <= NORM_TOL) and np.all(
                np.abs(v1[:, b, a] - v2[:, b, a]) <= NORM_TOL
            )
            if not same:
                continue
            if s1[a, b] >= 1 - SHARP_TOL and s2[a, b] < 1 - SHARP_TOL:
                sharp = False
            if s1[a, b] > UNSHARP_TOL and not s2[a, b] > UNSHARP_TOL:
                unsharp = False
    return sharp, unsharp

