"""Point-wise linear algebra on momentum space.

All functions accept a single momentum of shape ``(3,)`` or a stack of shape
``(..., 3)`` and broadcast accordingly. Spin-1 matrices are in units of hbar
and act on the spin basis ordered as ``m_s = +1, 0, -1`` (index ``s = 2 - m_s``
counted from 1, i.e. array index ``1 - m_s``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateFrame, ZeroMomentum

_S2 = np.sqrt(2.0)

V_MATRIX = np.array(
    [[1 / _S2, -1j / _S2, 0.0],
     [0.0, 0.0, -1.0],
     [-1 / _S2, -1j / _S2, 0.0]],
    dtype=complex,
)
V_MATRIX.setflags(write=False)

FRAME_EPS = 1e-12


def spin_index(m_s: int) -> int:
    """Array index of the spin component with eigenvalue ``m_s`` of ``S_z``."""
    if m_s not in (1, 0, -1):
        raise ValueError(f"m_s must be one of +1, 0, -1, got {m_s!r}")
    return 1 - m_s


@dataclass(frozen=True)
class SpinTriple:
    Sx: np.ndarray
    Sy: np.ndarray
    Sz: np.ndarray

    def along(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        return n[0] * self.Sx + n[1] * self.Sy + n[2] * self.Sz


def spin_matrices() -> SpinTriple:
    """Spin-1 matrices in the ``S_z`` eigenbasis."""
    sx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _S2
    sy = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _S2
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return SpinTriple(sx, sy, sz)


def v_matrix() -> np.ndarray:
    """The unitary map from Cartesian vectors to spin-1 components."""
    return V_MATRIX.copy()


def _norms(p: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(p, axis=-1)
    if np.any(r == 0.0):
        raise ZeroMomentum("momentum-dependent quantity requested at p = 0")
    return r


@dataclass(frozen=True)
class Frame:
    """Intrinsic frame ``(e1, e2, e3)`` attached to momentum ``p``.

    With ``e1 = p x (m x p) / (|p| |m x p|)`` and ``e2 = m x p / |m x p|`` the
    triad satisfies ``e2 x e1 = e3`` (it is left-handed in the order 1, 2, 3).
    """

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def stacked(self) -> np.ndarray:
        """Frame vectors as ``(..., 3, 3)`` with the frame label on axis -2."""
        return np.stack([self.e1, self.e2, self.e3], axis=-2)


def intrinsic_frame(p, m=(1.0, 0.0, 0.0), eps: float = FRAME_EPS) -> Frame:
    p = np.asarray(p, dtype=float)
    m = np.asarray(m, dtype=float)
    r = _norms(p)
    q = np.cross(m, p)
    qn = np.linalg.norm(q, axis=-1)
    if np.any(qn <= eps * r):
        raise DegenerateFrame("reference vector m is parallel to p")
    e3 = p / r[..., None]
    e2 = q / qn[..., None]
    e1 = np.cross(e3, e2)
    return Frame(e1, e2, e3)


def circular_vectors(frame: Frame) -> tuple[np.ndarray, np.ndarray]:
    """``e_plus, e_minus = (e1 -/+ i e2)/sqrt(2)``; ``p x e_pm = -/+ i |p| e_pm``."""
    e_plus = (frame.e1 - 1j * frame.e2) / _S2
    e_minus = (frame.e1 + 1j * frame.e2) / _S2
    return e_plus, e_minus


def helicity_matrix(p) -> np.ndarray:
    """``S . p/|p|`` in the spin basis; eigenvalues +1, 0, -1."""
    p = np.asarray(p, dtype=float)
    n = p / _norms(p)[..., None]
    s = spin_matrices()
    return (n[..., 0, None, None] * s.Sx + n[..., 1, None, None] * s.Sy
            + n[..., 2, None, None] * s.Sz)


def transverse_projector(p) -> np.ndarray:
    """Real projector ``I - n n^T`` onto the plane orthogonal to ``p``."""
    p = np.asarray(p, dtype=float)
    n = p / _norms(p)[..., None]
    return np.eye(3) - n[..., :, None] * n[..., None, :]


def conjugated_projector(p) -> np.ndarray:
    """Transverse projector expressed in the spin basis, ``V pi V^dagger``."""
    pi = transverse_projector(p)
    return V_MATRIX @ pi @ V_MATRIX.conj().T


def conjugated_projector_gradient(p) -> np.ndarray:
    """``d Pi / d p_j`` stacked as ``(..., 3[j], 3, 3)``."""
    p = np.asarray(p, dtype=float)
    r = _norms(p)
    n = p / r[..., None]
    dn = (np.eye(3) - n[..., None, :] * n[..., :, None]) / r[..., None, None]
    # dn[..., j, :] = d n / d p_j
    dpi = -(dn[..., :, :, None] * n[..., None, None, :]
            + n[..., None, :, None] * dn[..., :, None, :])
    return V_MATRIX @ dpi @ V_MATRIX.conj().T


def sn_eigenbasis(n) -> list[tuple[int, np.ndarray]]:
    """Eigenpairs of ``S . n`` for ``m_s = +1, 0, -1``.

    Phase convention: the largest-magnitude component of each eigenvector is
    real and positive (ties broken by the lowest index).
    """
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-10:
        raise ValueError("n must be a unit vector")
    w, vecs = np.linalg.eigh(spin_matrices().along(n))
    out = []
    for m_s in (1, 0, -1):
        k = int(np.argmin(np.abs(w - m_s)))
        v = vecs[:, k]
        j = int(np.argmax(np.round(np.abs(v), 12)))
        v = v * np.exp(-1j * np.angle(v[j]))
        out.append((m_s, v))
    return out


def frame_gradient(p, m=(1.0, 0.0, 0.0), eps: float = FRAME_EPS) -> np.ndarray:
    """Analytic ``d e_k / d p_j`` as an array ``(..., 3[k], 3[j], 3[component])``."""
    p = np.asarray(p, dtype=float)
    m = np.asarray(m, dtype=float)
    fr = intrinsic_frame(p, m, eps)
    r = np.linalg.norm(p, axis=-1)
    q = np.cross(m, p)
    qn = np.linalg.norm(q, axis=-1)
    eye = np.eye(3)
    # d e3 / d p_j = (e_j - e3 e3_j)/r
    de3 = (eye - fr.e3[..., :, None] * fr.e3[..., None, :]) / r[..., None, None]
    # d q / d p_j = m x e_j ; rows indexed by j
    dq = np.cross(m, eye)
    dq = np.broadcast_to(dq, de3.shape)
    proj = np.einsum("...c,...jc->...j", fr.e2, dq)
    de2 = (dq - fr.e2[..., None, :] * proj[..., :, None]) / qn[..., None, None]
    # e1 = e3 x e2
    de1 = (np.cross(de3, fr.e2[..., None, :]) + np.cross(fr.e3[..., None, :], de2))
    return np.stack([de1, de2, de3], axis=-3)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Real rotation by ``angle`` about the unit vector ``axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def spin_rotation(axis, angle: float) -> np.ndarray:
    """``exp(-i angle n.S)`` in the spin basis."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return expm(-1j * angle * spin_matrices().along(axis))
