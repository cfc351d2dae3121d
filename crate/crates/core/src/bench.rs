//! Benchmark circuit generators. Every two-qubit interaction is one
//! [`GateKind::TwoQubit`](crate::ir::GateKind::TwoQubit) op.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ir::Circuit;

const ONE_QUBIT_LABELS: [&str; 6] = ["h", "x", "rz", "ry", "s", "t"];

/// Quantum Fourier transform: for each qubit `i`, a Hadamard and then one
/// controlled phase from every later qubit. `n(n-1)/2` two-qubit gates.
pub fn qft(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for i in 0..n {
        c.one_qubit("h", i).expect("in range");
        for j in i + 1..n {
            c.two_qubit(j, i).expect("in range");
        }
    }
    c
}

/// Bernstein-Vazirani over `n` data qubits plus one ancilla (qubit `n`).
/// `secret[i]` set means data qubit `i` controls the ancilla; the default
/// secret is all ones.
pub fn bernstein_vazirani(n: usize, secret: Option<&[bool]>) -> Result<Circuit, Error> {
    let ones = vec![true; n];
    let secret = secret.unwrap_or(&ones);
    if secret.len() != n {
        return Err(Error::Bench(format!(
            "secret has {} bits for {n} data qubits",
            secret.len()
        )));
    }
    let mut c = Circuit::new(n + 1);
    c.one_qubit("x", n)?;
    for q in 0..=n {
        c.one_qubit("h", q)?;
    }
    for (q, &bit) in secret.iter().enumerate() {
        if bit {
            c.two_qubit(q, n)?;
        }
    }
    for q in 0..n {
        c.one_qubit("h", q)?;
    }
    for q in 0..n {
        c.measure(q)?;
    }
    Ok(c)
}

/// QAOA on a nearest-neighbour line: each of `p` layers is a mixing
/// rotation on every qubit followed by ZZ terms `(0,1), (1,2), ...`.
/// `p(n-1)` two-qubit gates.
pub fn qaoa_nn(n: usize, p: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..p {
        for q in 0..n {
            c.one_qubit("ry", q).expect("in range");
        }
        for q in 0..n.saturating_sub(1) {
            c.two_qubit(q, q + 1).expect("in range");
        }
    }
    c
}

/// Random brickwork of nearest-neighbour gates: each layer applies a
/// random one-qubit gate to every qubit, then couples `(i, i+1)` for all
/// `i` of the layer's parity. Deterministic in `seed`.
pub fn random_nn(n: usize, depth: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    for layer in 0..depth {
        for q in 0..n {
            let label = ONE_QUBIT_LABELS[rng.gen_range(0..ONE_QUBIT_LABELS.len())];
            c.one_qubit(label, q).expect("in range");
        }
        let mut i = layer % 2;
        while i + 1 < n {
            c.two_qubit(i, i + 1).expect("in range");
            i += 2;
        }
    }
    c
}

/// Serializable benchmark selector used by sweep files and the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "bench", rename_all = "snake_case", deny_unknown_fields)]
pub enum BenchSpec {
    Qft {
        n: usize,
    },
    Bv {
        n: usize,
        /// Bit string over the data qubits, qubit 0 first, e.g. `"1011"`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        secret: Option<String>,
    },
    QaoaNn {
        n: usize,
        p: usize,
    },
    RandomNn {
        n: usize,
        depth: usize,
        seed: u64,
    },
}

impl BenchSpec {
    pub fn build(&self) -> Result<Circuit, Error> {
        match self {
            BenchSpec::Qft { n } => Ok(qft(*n)),
            BenchSpec::Bv { n, secret } => match secret {
                None => bernstein_vazirani(*n, None),
                Some(s) => {
                    let bits = s
                        .chars()
                        .map(|ch| match ch {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            _ => Err(Error::Bench(format!("secret `{s}` is not a bit string"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    bernstein_vazirani(*n, Some(&bits))
                }
            },
            BenchSpec::QaoaNn { n, p } => Ok(qaoa_nn(*n, *p)),
            BenchSpec::RandomNn { n, depth, seed } => Ok(random_nn(*n, *depth, *seed)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            BenchSpec::Qft { n } => format!("qft{n}"),
            BenchSpec::Bv { n, .. } => format!("bv{n}"),
            BenchSpec::QaoaNn { n, p } => format!("qaoa{n}p{p}"),
            BenchSpec::RandomNn { n, depth, seed } => format!("random{n}d{depth}s{seed}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{emit_qasm, parse_qasm, GateKind};

    #[test]
    fn qft_counts() {
        for n in 1..12 {
            assert_eq!(qft(n).two_qubit_count(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn bv_counts_follow_secret() {
        let c = bernstein_vazirani(5, Some(&[true, false, true, true, false])).unwrap();
        assert_eq!(c.num_qubits(), 6);
        assert_eq!(c.two_qubit_count(), 3);
        assert!(c.ops().iter().filter(|o| o.is_two_qubit()).all(|o| o.qubits[1] == 5));
        assert_eq!(bernstein_vazirani(4, None).unwrap().two_qubit_count(), 4);
        assert!(bernstein_vazirani(4, Some(&[true])).is_err());
    }

    #[test]
    fn qaoa_is_a_ladder() {
        let c = qaoa_nn(5, 3);
        assert_eq!(c.two_qubit_count(), 12);
        let pairs: Vec<_> = c.ops().iter().filter(|o| o.is_two_qubit()).map(|o| (o.qubits[0], o.qubits[1])).collect();
        assert_eq!(&pairs[..4], &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn random_is_deterministic_and_nearest_neighbour() {
        let a = random_nn(7, 6, 42);
        assert_eq!(a, random_nn(7, 6, 42));
        assert_ne!(a, random_nn(7, 6, 43));
        for op in a.ops().iter().filter(|o| o.is_two_qubit()) {
            assert_eq!(op.qubits[1], op.qubits[0] + 1);
        }
        // 3 pairs on even layers, 3 on odd layers for n = 7
        assert_eq!(a.two_qubit_count(), 18);
    }

    #[test]
    fn generated_circuits_round_trip_through_qasm() {
        for c in [qft(5), bernstein_vazirani(4, None).unwrap(), qaoa_nn(4, 2), random_nn(5, 4, 1)] {
            let back = parse_qasm(&emit_qasm(&c)).unwrap();
            assert_eq!(back.num_qubits(), c.num_qubits());
            assert_eq!(back.ops().len(), c.ops().len());
            for (x, y) in back.ops().iter().zip(c.ops()) {
                assert_eq!(x.qubits, y.qubits);
                assert_eq!(matches!(x.kind, GateKind::TwoQubit), matches!(y.kind, GateKind::TwoQubit));
            }
        }
    }

    #[test]
    fn spec_parses_from_json() {
        let s: BenchSpec = serde_json::from_str(r#"{"bench":"bv","n":4,"secret":"1010"}"#).unwrap();
        assert_eq!(s.build().unwrap().two_qubit_count(), 2);
        let s: BenchSpec = serde_json::from_str(r#"{"bench":"qaoa_nn","n":6,"p":2}"#).unwrap();
        assert_eq!(s.label(), "qaoa6p2");
    }
}
