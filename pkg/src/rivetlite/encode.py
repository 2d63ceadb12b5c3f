"""Data-to-circuit encoders and the trainable ansatz layer.

Three encodings: one rx per feature (angle), a uniformly-controlled-ry state
preparation (amplitude, non-negative vectors only), and the pairwise ZZ
feature map with deferred product angles. ``pqc_layer`` supplies the ry + cx
chain used by the trainer, one parameter per qubit per layer.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Gate, Param, ParamExpr
from .exceptions import CircuitError


def angle_encode(features) -> Circuit:
    """rx(x_i) on qubit i; depth 1. Symbol entries give a symbolic circuit."""
    feats = list(features)
    if not feats:
        raise CircuitError("angle_encode needs at least one feature")
    gates = []
    for q, x in enumerate(feats):
        if isinstance(x, (int, float)) and not math.isfinite(x):
            raise CircuitError(f"feature {q} is not finite: {x}")
        gates.append(Gate("rx", (q,), (x if isinstance(x, (str, ParamExpr)) else float(x),)))
    return Circuit(len(feats), tuple(gates))


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _multiplexer_angles(alphas: np.ndarray, k: int) -> np.ndarray:
    """Rotation angles for a k-controlled ry multiplexer, Gray-code order.

    Solves theta = M alpha with M[i, j] = 2^-k * (-1)^popcount(j & gray(i)).
    """
    m = 1 << k
    M = np.array([[(-1) ** bin(j & _gray(i)).count("1") for j in range(m)]
                  for i in range(m)], dtype=float) / m
    return M @ alphas


def amplitude_encode(features) -> Circuit:
    """Prepare the L2-normalized non-negative vector as the statevector.

    Binary tree of uniformly controlled ry rotations: the node splitting a
    segment rotates by 2*atan2(||right half||, ||left half||); each
    k-controlled multiplexer is expanded into 2^k ry + 2^k cx along a
    Gray-code walk. Levels whose angles are all zero are skipped.
    """
    v = np.asarray(list(features), dtype=float)
    if v.ndim != 1 or len(v) < 2 or len(v) & (len(v) - 1):
        raise CircuitError(f"feature count must be a power of two >= 2, got {v.shape}")
    if (v < 0).any():
        raise CircuitError("amplitude encoding requires non-negative features")
    if not np.isfinite(v).all():
        raise CircuitError("features must be finite")
    if not v.any():
        raise CircuitError("cannot encode the all-zero vector")

    n = int(math.log2(len(v)))
    gates: list[Gate] = []
    for level in range(n):
        seg = 1 << (n - level)
        alphas = np.empty(1 << level)
        for j in range(1 << level):
            block = v[j * seg:(j + 1) * seg]
            left = float(np.linalg.norm(block[: seg // 2]))
            right = float(np.linalg.norm(block[seg // 2:]))
            alphas[j] = 2.0 * math.atan2(right, left)
        if np.abs(alphas).max() < 1e-12:
            continue
        target = n - 1 - level
        if level == 0:
            gates.append(Gate("ry", (target,), (float(alphas[0]),)))
            continue
        controls = list(range(n - level, n))
        thetas = _multiplexer_angles(alphas, level)
        for i in range(1 << level):
            gates.append(Gate("ry", (target,), (float(thetas[i]),)))
            if i == (1 << level) - 1:
                changed = level - 1
            else:
                changed = int(math.log2(_gray(i) ^ _gray(i + 1)))
            gates.append(Gate("cx", (controls[changed], target)))
    return Circuit(n, tuple(gates))


def zz_feature_map(n: int, reps: int = 1) -> Circuit:
    """Symbolic ZZ map in x_0..x_{n-1}: h layer, rz(2 x_i), then pairwise
    cx - rz(2 (pi - x_i)(pi - x_j)) - cx for every i < j, repeated ``reps`` times."""
    if n < 2:
        raise CircuitError("zz_feature_map needs n >= 2")
    if reps < 1:
        raise CircuitError("reps must be >= 1")
    gates: list[Gate] = []
    for _ in range(reps):
        for q in range(n):
            gates.append(Gate("h", (q,)))
        for q in range(n):
            gates.append(Gate("rz", (q,),
                              (ParamExpr(0.0, 2.0, ((0.0, 1.0, f"x_{q}"),)),)))
        for i in range(n):
            for j in range(i + 1, n):
                angle = ParamExpr(0.0, 2.0, ((math.pi, -1.0, f"x_{i}"),
                                             (math.pi, -1.0, f"x_{j}")))
                gates.append(Gate("cx", (i, j)))
                gates.append(Gate("rz", (j,), (angle,)))
                gates.append(Gate("cx", (i, j)))
    return Circuit(n, tuple(gates))


def pqc_symbol(layer_index: int, qubit: int) -> str:
    return f"theta_{layer_index}_{qubit}"


def pqc_layer(n: int, layer_index: int) -> Circuit:
    """One trainable block: ry(theta_{layer,q}) per qubit, then a cx chain."""
    if n < 1:
        raise CircuitError("pqc_layer needs n >= 1")
    gates = [Gate("ry", (q,), (pqc_symbol(layer_index, q),)) for q in range(n)]
    gates += [Gate("cx", (q, q + 1)) for q in range(n - 1)]
    return Circuit(n, tuple(gates))


def encoder_for(name: str, features) -> Circuit:
    """Dispatch by CLI name: angle | amplitude | zz (zz binds the symbols)."""
    if name == "angle":
        return angle_encode(features)
    if name == "amplitude":
        return amplitude_encode(features)
    if name == "zz":
        feats = [float(x) for x in features]
        from .circuit import bind
        return bind(zz_feature_map(len(feats)),
                    {f"x_{i}": x for i, x in enumerate(feats)})
    raise CircuitError(f"unknown encoding {name!r}")
