"""Small dense Hermitian matrices: Jacobi eigenvalues and partial transposes."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_DIM = 64
HERMITIAN_TOL = 1e-12


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class DenseHermitian:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if m.shape[0] > MAX_DIM:
            raise ValueError(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def is_density(self, tol: float = 1e-10) -> bool:
        if abs(self.trace() - 1) > tol:
            return False
        return min(hermitian_eigenvalues(self)) >= -tol

    def to_dict(self) -> dict:
        flat = self.matrix.reshape(-1)
        return {"dim": self.dim, "re": flat.real.tolist(), "im": flat.imag.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DenseHermitian":
        d = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", [0.0] * (d * d)), dtype=float)
        if re.size != d * d or im.size != d * d:
            raise ValueError("re/im must hold dim*dim entries")
        return cls((re + 1j * im).reshape(d, d))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DenseHermitian":
        return cls.from_dict(json.loads(text))


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eigenvalues(m: DenseHermitian, tol: float = 1e-12, max_sweeps: int = 200) -> list:
    """Eigenvalues by cyclic complex Jacobi rotations, descending."""
    a = np.array(m.matrix, dtype=complex)
    d = a.shape[0]
    for _ in range(max_sweeps):
        if _off_norm(a) < tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                g = abs(apq)
                if g < 1e-300:
                    continue
                phase = apq / g
                theta = (a[q, q].real - a[p, p].real) / (2 * g)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                # column p of J is (c, -s conj(phase)), column q is (s, c conj(phase))
                jb = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                a[:, [p, q]] = a[:, [p, q]] @ jb
                a[[p, q], :] = jb.conj().T @ a[[p, q], :]
                a[p, q] = a[q, p] = 0
    else:
        if _off_norm(a) >= tol:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return sorted((float(x) for x in np.diag(a).real), reverse=True)


def partial_transpose(m: DenseHermitian, dim_a: int, dim_b: int) -> DenseHermitian:
    """Transpose the second tensor factor: ``(a b, a' b') -> (a b', a' b)``."""
    if dim_a * dim_b != m.dim:
        raise ValueError(f"{dim_a}x{dim_b} does not match dimension {m.dim}")
    t = m.matrix.reshape(dim_a, dim_b, dim_a, dim_b).transpose(0, 3, 2, 1)
    return DenseHermitian(t.reshape(m.dim, m.dim))


def pt_moments(m: DenseHermitian, dim_a: int, dim_b: int, t: int) -> list:
    """``Tr[(rho^Gamma)^k]`` for ``k = 1..t`` by repeated multiplication."""
    pt = partial_transpose(m, dim_a, dim_b).matrix
    out = []
    power = np.eye(m.dim, dtype=complex)
    for _ in range(t):
        power = power @ pt
        out.append(float(np.trace(power).real))
    return out


def pt_moments_exact(rows, dim_a: int, dim_b: int, t: int) -> list:
    """Exact PT moments of a real symmetric matrix with rational entries."""
    m = [[Fraction(x) for x in row] for row in rows]
    d = len(m)
    if dim_a * dim_b != d or any(len(row) != d for row in m):
        raise ValueError("shape does not match dim_a * dim_b")
    pt = [[Fraction(0)] * d for _ in range(d)]
    for a in range(dim_a):
        for b in range(dim_b):
            for a2 in range(dim_a):
                for b2 in range(dim_b):
                    pt[a * dim_b + b2][a2 * dim_b + b] = m[a * dim_b + b][a2 * dim_b + b2]
    out = []
    power = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for _ in range(t):
        power = [
            [sum((power[i][x] * pt[x][j] for x in range(d)), Fraction(0)) for j in range(d)]
            for i in range(d)
        ]
        out.append(sum((power[i][i] for i in range(d)), Fraction(0)))
    return out


def bell_state() -> DenseHermitian:
    """``|Phi+><Phi+|`` on two qubits."""
    v = np.array([1, 0, 0, 1]) / math.sqrt(2)
    return DenseHermitian(np.outer(v, v.conj()))


def werner_state(w: float) -> DenseHermitian:
    """``w |Phi+><Phi+| + (1 - w) I/4``."""
    return DenseHermitian(w * bell_state().matrix + (1 - w) * np.eye(4) / 4)


def werner_rows(w: Fraction) -> list:
    """Rational entries of the Werner state, for the exact moment path."""
    w = Fraction(w)
    rows = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        rows[i][i] = (1 - w) / 4
    for i in (0, 3):
        for j in (0, 3):
            rows[i][j] += w / 2
    return rows


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DenseHermitian:
    """Random density matrix from a complex Ginibre draw."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DenseHermitian(rho / np.trace(rho).real)
