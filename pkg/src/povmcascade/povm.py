"""POVM and Kraus-operator data model, validation, and the analytic oracle.

A POVM on the polarization qubit is a list of Hermitian positive
semidefinite 2x2 operators summing to the identity.  Each element F can be
written F = M^dag M for a Kraus operator M; the measurement sends a state
rho to M rho M^dag / p with probability p = tr(M rho M^dag).  Element order
is significant: outcome i of the compiled cascade is list position i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmath import (
    DEFAULT_TOL,
    NotHermitian,
    NotPsd,
    as_matrix2,
    dagger,
    eig_hermitian2,
    identity2,
    is_unitary,
    max_abs,
    sqrt_psd,
)

__all__ = [
    "IncompleteSum",
    "NotUnitary",
    "PovmSet",
    "KrausSet",
    "DensityMatrix",
    "OutcomeRecord",
    "validate_povm",
    "validate_kraus",
    "kraus_from_povm",
    "density_matrix",
    "density_from_pure",
    "outcome_probabilities",
    "validation_residuals",
]

#: outcomes with probability below this have no well-defined post state
PROBABILITY_FLOOR = 1e-12


class IncompleteSum(ValueError):
    """The POVM elements do not sum to the identity."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotUnitary(ValueError):
    """A matrix expected to be unitary is not (beyond tolerance)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class PovmSet:
    """Validated, ordered POVM elements F_1..F_n.  Build via :func:`validate_povm`."""

    elements: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


@dataclass(frozen=True)
class KrausSet:
    """Validated, ordered Kraus operators M_1..M_n with sum M^dag M = I."""

    operators: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __getitem__(self, i):
        return self.operators[i]

    def povm_elements(self) -> tuple[np.ndarray, ...]:
        """The measurement operators F_i = M_i^dag M_i (exit-unitary independent)."""
        return tuple(dagger(m) @ m for m in self.operators)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD unit-trace 2x2 state.  Build via :func:`density_matrix`."""

    rho: np.ndarray


@dataclass(frozen=True)
class OutcomeRecord:
    """One measurement outcome: 1-based index, probability, post state.

    ``post_state`` is None when the probability is below PROBABILITY_FLOOR,
    where normalizing the conditional state would divide by ~0.
    """

    index: int
    probability: float
    post_state: DensityMatrix | None


def validate_povm(elements, tol: float = DEFAULT_TOL) -> PovmSet:
    """Check Hermiticity, positivity, and completeness of a POVM element list.

    Raises the first violation found: NotHermitian(i), NotPsd(i) with the
    offending minimum eigenvalue, or IncompleteSum with the entrywise
    residual of sum(F) - I.  Zero elements are legal; they arise in
    degenerate parameterizations and the algebra tolerates them.
    """
    mats = [as_matrix2(e, name=f"element {i + 1}") for i, e in enumerate(elements)]
    if len(mats) < 2:
        raise ValueError(f"a POVM needs at least 2 elements, got {len(mats)}")
    for i, f in enumerate(mats):
        herm_residual = max_abs(f - dagger(f))
        if herm_residual > tol:
            raise NotHermitian(
                f"element {i + 1}: hermiticity residual {herm_residual:.3e}",
                index=i,
                residual=herm_residual,
            )
        lam, _ = eig_hermitian2(0.5 * (f + dagger(f)), tol=np.inf)
        if lam[1] < -tol:
            raise NotPsd(
                f"element {i + 1}: minimum eigenvalue {lam[1]:.3e}",
                index=i,
                min_eigenvalue=float(lam[1]),
            )
    total = sum(mats[1:], start=mats[0])
    residual = max_abs(total - identity2())
    if residual > tol:
        raise IncompleteSum(f"sum of elements deviates from identity by {residual:.3e}", residual)
    return PovmSet(tuple(mats))


def validate_kraus(operators, tol: float = DEFAULT_TOL) -> KrausSet:
    """Check the completeness relation sum M^dag M = I and wrap the operators."""
    mats = [as_matrix2(m, name=f"operator {i + 1}") for i, m in enumerate(operators)]
    if len(mats) < 2:
        raise ValueError(f"a Kraus set needs at least 2 operators, got {len(mats)}")
    total = sum((dagger(m) @ m for m in mats), start=np.zeros((2, 2), dtype=complex))
    residual = max_abs(total - identity2())
    if residual > tol:
        raise IncompleteSum(f"sum of M^dag M deviates from identity by {residual:.3e}", residual)
    return KrausSet(tuple(mats))


def kraus_from_povm(povm: PovmSet, exit_unitaries=None, tol: float = DEFAULT_TOL) -> KrausSet:
    """Canonical Kraus operators M_i = V_i sqrt(F_i).

    With no exit unitaries the principal square root is used (V_i = I).
    Supplying unitaries changes the conditional output states while leaving
    the measurement statistics untouched.
    """
    if exit_unitaries is None:
        exit_unitaries = [identity2()] * len(povm)
    else:
        exit_unitaries = [as_matrix2(u, name=f"exit unitary {i + 1}") for i, u in enumerate(exit_unitaries)]
        if len(exit_unitaries) != len(povm):
            raise ValueError(
                f"expected {len(povm)} exit unitaries, got {len(exit_unitaries)}"
            )
        for i, u in enumerate(exit_unitaries):
            if not is_unitary(u, tol):
                raise NotUnitary(f"exit unitary {i + 1} is not unitary", index=i)
    ops = [v @ sqrt_psd(f, tol) for v, f in zip(exit_unitaries, povm)]
    return validate_kraus(ops, tol)


def density_matrix(rho, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Validate a 2x2 density matrix (Hermitian, PSD, unit trace)."""
    rho = as_matrix2(rho, name="density matrix")
    herm_residual = max_abs(rho - dagger(rho))
    if herm_residual > tol:
        raise NotHermitian(f"density matrix hermiticity residual {herm_residual:.3e}", residual=herm_residual)
    lam, _ = eig_hermitian2(0.5 * (rho + dagger(rho)), tol=np.inf)
    if lam[1] < -tol:
        raise NotPsd(f"density matrix minimum eigenvalue {lam[1]:.3e}", min_eigenvalue=float(lam[1]))
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > tol:
        raise ValueError(f"density matrix trace {trace:.12g} is not 1")
    return DensityMatrix(rho)


def density_from_pure(psi) -> DensityMatrix:
    """|psi><psi| for a (normalized on entry) 2-component amplitude vector."""
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ValueError("cannot build a state from the zero vector")
    psi = psi / norm
    return DensityMatrix(np.outer(psi, psi.conj()))


def outcome_probabilities(rho: DensityMatrix, kraus: KrausSet) -> list[OutcomeRecord]:
    """Measurement statistics of a Kraus set on a state.

    Outcome i carries probability p_i = tr(M_i rho M_i^dag), clamped into
    [0, 1] against round-off, and the normalized post state
    M_i rho M_i^dag / p_i when p_i is above PROBABILITY_FLOOR.
    """
    records = []
    for i, m in enumerate(kraus):
        transformed = m @ rho.rho @ dagger(m)
        p = float(np.trace(transformed).real)
        p = min(max(p, 0.0), 1.0)
        if p >= PROBABILITY_FLOOR:
            post = transformed / p
            post = 0.5 * (post + dagger(post))
            records.append(OutcomeRecord(i + 1, p, DensityMatrix(post)))
        else:
            records.append(OutcomeRecord(i + 1, p, None))
    return records


def validation_residuals(elements) -> tuple[list[tuple[float, float]], float]:
    """Diagnostic residuals for reporting: per element (hermiticity residual,
    minimum eigenvalue) plus the completeness residual ||sum F - I||."""
    mats = [as_matrix2(e, name=f"element {i + 1}") for i, e in enumerate(elements)]
    per_element = []
    for f in mats:
        herm_residual = max_abs(f - dagger(f))
        lam, _ = eig_hermitian2(0.5 * (f + dagger(f)), tol=np.inf)
        per_element.append((herm_residual, float(lam[1])))
    total = sum(mats[1:], start=mats[0])
    return per_element, max_abs(total - identity2())
