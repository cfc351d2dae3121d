#!/usr/bin/env python3
"""Regenerates the QASM fixtures in this directory.

    python3 gen_fixtures.py
"""
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def header(n, measured):
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f'qreg q[{n}];']
    if measured:
        lines.append(f'creg c[{n}];')
    return lines


def toffoli(a, b, t):
    # standard 6-CNOT decomposition
    return [
        f'h q[{t}];', f'cx q[{b}],q[{t}];', f'tdg q[{t}];', f'cx q[{a}],q[{t}];',
        f't q[{t}];', f'cx q[{b}],q[{t}];', f'tdg q[{t}];', f'cx q[{a}],q[{t}];',
        f't q[{b}];', f't q[{t}];', f'h q[{t}];', f'cx q[{a}],q[{b}];',
        f't q[{a}];', f'tdg q[{b}];', f'cx q[{a}],q[{b}];',
    ]


def long_range(n=24, gates=160, seed=7):
    """Random pairs drawn uniformly over all qubits, so most gates span traps."""
    rng = random.Random(seed)
    lines = header(n, False)
    for _ in range(gates):
        a, b = rng.sample(range(n), 2)
        lines.append(f'rz(0.25) q[{a}];')
        lines.append(f'cx q[{a}],q[{b}];')
    return lines


def adder(bits=8):
    """Ripple-carry adder a += b with one carry-in and one carry-out qubit."""
    n = 2 * bits + 2
    cin, a, b, cout = 0, list(range(1, bits + 1)), list(range(bits + 1, 2 * bits + 1)), 2 * bits + 1
    lines = header(n, True)

    def maj(x, y, z):
        return [f'cx q[{z}],q[{y}];', f'cx q[{z}],q[{x}];'] + toffoli(x, y, z)

    def uma(x, y, z):
        return toffoli(x, y, z) + [f'cx q[{z}],q[{x}];', f'cx q[{x}],q[{y}];']

    for i in range(bits):
        lines.append(f'x q[{a[i]}];')
        if i % 2 == 0:
            lines.append(f'x q[{b[i]}];')
    prev = cin
    for i in range(bits):
        lines += maj(prev, b[i], a[i])
        prev = a[i]
    lines.append(f'cx q[{a[-1]}],q[{cout}];')
    for i in reversed(range(bits)):
        lines += uma(a[i - 1] if i else cin, b[i], a[i])
    for q in range(n):
        lines.append(f'measure q[{q}] -> c[{q}];')
    return lines


def square_root(work=6):
    """Grover iterations over `work` qubits with a Toffoli-ladder oracle and diffuser."""
    anc = list(range(work, 2 * work - 1))
    n = 2 * work
    target = n - 1
    lines = header(n, True)

    def mcx(controls):
        out = toffoli(controls[0], controls[1], anc[0])
        for k in range(2, len(controls)):
            out += toffoli(controls[k], anc[k - 2], anc[k - 1])
        out.append(f'cx q[{anc[len(controls) - 2]}],q[{target}];')
        for k in reversed(range(2, len(controls))):
            out += toffoli(controls[k], anc[k - 2], anc[k - 1])
        out += toffoli(controls[0], controls[1], anc[0])
        return out

    ctrl = list(range(work))
    lines += [f'x q[{target}];', f'h q[{target}];']
    lines += [f'h q[{q}];' for q in ctrl]
    for _ in range(2):
        lines += [f'x q[{q}];' for q in ctrl[::2]]
        lines += mcx(ctrl)
        lines += [f'x q[{q}];' for q in ctrl[::2]]
        lines += [f'h q[{q}];' for q in ctrl] + [f'x q[{q}];' for q in ctrl]
        lines += mcx(ctrl)
        lines += [f'x q[{q}];' for q in ctrl] + [f'h q[{q}];' for q in ctrl]
    lines += [f'measure q[{q}] -> c[{q}];' for q in ctrl]
    return lines


def main():
    for name, lines in [
        ('long_range_24.qasm', long_range()),
        ('adder_8.qasm', adder()),
        ('square_root_6.qasm', square_root()),
    ]:
        (HERE / name).write_text('\n'.join(lines) + '\n')


if __name__ == '__main__':
    main()
