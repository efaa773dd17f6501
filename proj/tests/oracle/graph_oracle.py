#!/usr/bin/env python3
# Copyright 2026 The rtqec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reference decoding graph for the stability-8 circuit from dense statevector simulation.

Each single Pauli fault is inserted into an otherwise noiseless 8-qubit statevector run.
Measurements project onto a fixed branch; detectors are deterministic, so the branch choice
does not change the defect set. Shares no code with the C++ library.

usage: graph_oracle.py ROUNDS P > graph.txt
"""

import math
import sys

import numpy as np

NQ = 8
DATA = [0, 1, 2, 3]
ANC = [4, 5, 6, 7]
SUPPORT = [(a, (a + 1) % 4) for a in range(4)]

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def apply1(psi, gate, q):
    psi = np.tensordot(gate, psi, axes=([1], [q]))
    return np.moveaxis(psi, 0, q)


def apply_cz(psi, a, b):
    psi = psi.copy()
    idx = [slice(None)] * NQ
    idx[a] = 1
    idx[b] = 1
    psi[tuple(idx)] *= -1
    return psi


def measure(psi, q):
    """Projects qubit q onto the more likely outcome (ties go to 0)."""
    idx0 = [slice(None)] * NQ
    idx0[q] = 0
    idx1 = [slice(None)] * NQ
    idx1[q] = 1
    p1 = float(np.sum(np.abs(psi[tuple(idx1)]) ** 2))
    outcome = 1 if p1 > 0.5 + 1e-9 else 0
    psi = psi.copy()
    psi[tuple(idx1 if outcome == 0 else idx0)] = 0
    psi /= np.linalg.norm(psi)
    return psi, outcome


def layers(rounds):
    """(kind, qubits) in execution order."""
    out = [("prep", list(DATA))]
    for r in range(1, rounds + 1):
        out.append(("h", list(ANC)))
        out.append(("cz", [(ANC[a], DATA[SUPPORT[a][0]]) for a in range(4)]))
        out.append(("cz", [(ANC[a], DATA[SUPPORT[a][1]]) for a in range(4)]))
        out.append(("h", list(ANC)))
        out.append(("measure", list(ANC) + (list(DATA) if r == rounds else [])))
    return out


def channels(rounds, p):
    """Noise channels after each layer: (layer, kind, qubits, probability)."""
    p1 = p / 10
    chans = []
    for li, (kind, qs) in enumerate(layers(rounds)):
        busy = set()
        if kind in ("prep", "h"):
            for q in qs:
                busy.add(q)
                chans.append((li, "dep1", (q,), p1))
        elif kind == "cz":
            for a, b in qs:
                busy.update((a, b))
                chans.append((li, "dep2", (a, b), p))
        else:
            for q in qs:
                busy.add(q)
                chans.append((li, "flip", (q,), p))
                chans.append((li, "dep1", (q,), p1))
        for q in range(NQ):
            if q not in busy:
                chans.append((li, "dep1", (q,), p1))
    return chans


def run(rounds, fault=None):
    """Measurement record with an optional fault (layer, kind, qubits, paulis)."""
    psi = np.zeros((2,) * NQ, dtype=complex)
    psi[(0,) * NQ] = 1
    record = []
    for li, (kind, qs) in enumerate(layers(rounds)):
        flips = set()
        if kind in ("prep", "h"):
            for q in qs:
                psi = apply1(psi, H, q)
        elif kind == "cz":
            for a, b in qs:
                psi = apply_cz(psi, a, b)
        if fault is not None and fault[0] == li and fault[1] == "flip":
            flips.add(fault[2][0])
        if kind == "measure":
            for q in qs:
                psi, m = measure(psi, q)
                record.append((q, m ^ (1 if q in flips else 0)))
        if fault is not None and fault[0] == li and fault[1] != "flip":
            for q, pauli in zip(fault[2], fault[3]):
                if pauli:
                    psi = apply1(psi, PAULI[pauli], q)
    return record


def ancilla_bits(rounds, record):
    m = {}
    r = 0
    count = 0
    for q, bit in record:
        if q in ANC:
            if count % 4 == 0:
                r += 1
            count += 1
            m[(ANC.index(q), r)] = bit
    return m


def detectors_and_observable(rounds, record):
    m = ancilla_bits(rounds, record)
    get = lambda a, r: 0 if r <= 0 else m[(a, r)]
    dets = []
    for r in range(2, rounds + 1):
        for a in range(4):
            dets.append(get(a, r) ^ get(a, r - 2))
    obs = 0
    for a in range(4):
        obs ^= get(a, rounds) ^ get(a, rounds - 1)
    return dets, obs


def fault_terms(chan):
    li, kind, qs, prob = chan
    if kind == "flip":
        yield (li, kind, qs, None), prob
    elif kind == "dep1":
        for t in (1, 2, 3):
            yield (li, kind, qs, (t,)), prob / 3
    else:
        for code in range(1, 16):
            yield (li, kind, qs, (code // 4, code % 4)), prob / 15


def xor_p(a, b):
    return a + b - 2 * a * b


def build(rounds, p):
    base_dets, base_obs = detectors_and_observable(rounds, run(rounds))
    assert not any(base_dets) and base_obs == 0, "noiseless run must be trivial"
    edges = {}
    boundary = 2**32 - 1
    for chan in channels(rounds, p):
        for fault, prob in fault_terms(chan):
            dets, obs = detectors_and_observable(rounds, run(rounds, fault))
            defects = [i for i, d in enumerate(dets) if d]
            if len(defects) > 2:
                raise RuntimeError(f"fault {fault} produced {len(defects)} defects")
            if not defects:
                if obs:
                    raise RuntimeError(f"fault {fault} flips the observable silently")
                continue
            key = (defects[0], defects[1] if len(defects) == 2 else boundary, obs)
            edges[key] = xor_p(edges.get(key, 0.0), prob)
    lines = []
    for (u, v, obs) in sorted(edges):
        pe = edges[(u, v, obs)]
        w = -math.log(pe / (1 - pe))
        lines.append("%d %d %.17g %.17g %d" % (u, -1 if v == boundary else v, pe, w, obs))
    return lines


if __name__ == "__main__":
    rounds = int(sys.argv[1])
    p = float(sys.argv[2])
    print("\n".join(build(rounds, p)))
