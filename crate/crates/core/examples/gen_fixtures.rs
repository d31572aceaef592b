//! Writes the synthetic chemistry-like Hamiltonians in `fixtures/`.
//!
//! The term classes and magnitudes follow those of Jordan–Wigner encoded
//! molecular Hamiltonians: strong single-Z and ZZ terms, hopping strings
//! `X Z…Z X` / `Y Z…Z Y` between same-parity qubits (some dressed with an
//! extra Z), and small double-excitation strings on four qubits with Z
//! strings inside each pair. Coefficients span roughly 0.002 to 1.0.
//!
//!     cargo run -p pauli-shadows --example gen_fixtures

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let magnitude = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

fn word(n: usize, letters: &[(usize, char)]) -> String {
    let mut w = vec!['I'; n];
    for &(q, c) in letters {
        w[q] = c;
    }
    w.into_iter().collect()
}

fn chemistry_like(n: usize, dressed_every: usize, doubles: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    writeln!(
        out,
        "# synthetic chemistry-like Hamiltonian, {n} qubits, seed {seed}"
    )
    .unwrap();
    writeln!(out, "{:.6} {}", rng.random_range(1.0..3.0), "I".repeat(n)).unwrap();
    for i in 0..n {
        writeln!(
            out,
            "{:.6} {}",
            -rng.random_range(0.25..1.05),
            word(n, &[(i, 'Z')])
        )
        .unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            let c = rng.random_range(0.08..0.19);
            writeln!(out, "{c:.6} {}", word(n, &[(i, 'Z'), (j, 'Z')])).unwrap();
        }
    }
    // hopping between same-parity qubits, plain and dressed with a Z elsewhere
    let mut pair_index = 0;
    for i in 0..n {
        for j in (i + 2..n).step_by(2) {
            let string: Vec<(usize, char)> = (i + 1..j).map(|k| (k, 'Z')).collect();
            let c = signed(&mut rng, 0.02, 0.09);
            for ends in ['X', 'Y'] {
                let mut letters = string.clone();
                letters.extend([(i, ends), (j, ends)]);
                writeln!(out, "{c:.6} {}", word(n, &letters)).unwrap();
            }
            if pair_index % dressed_every == 0 {
                let outside: Vec<usize> = (0..n).filter(|&k| k < i || k > j).collect();
                if !outside.is_empty() {
                    let k = outside[rng.random_range(0..outside.len())];
                    let c = signed(&mut rng, 0.01, 0.045);
                    for ends in ['X', 'Y'] {
                        let mut letters = string.clone();
                        letters.extend([(i, ends), (j, ends), (k, 'Z')]);
                        writeln!(out, "{c:.6} {}", word(n, &letters)).unwrap();
                    }
                }
            }
            pair_index += 1;
        }
    }
    // double excitations: pairs (a, b) and (c, d) with Z strings inside each pair
    const PATTERNS: [&str; 8] = [
        "XXXX", "YYYY", "XXYY", "YYXX", "XYYX", "YXXY", "XYXY", "YXYX",
    ];
    const SIGNS: [f64; 8] = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
    for _ in 0..doubles {
        let mut q = sample(&mut rng, n, 4).into_vec();
        q.sort_unstable();
        let string: Vec<(usize, char)> = (q[0] + 1..q[1])
            .chain(q[2] + 1..q[3])
            .map(|k| (k, 'Z'))
            .collect();
        let c = rng.random_range(0.002..0.035);
        for (pattern, sign) in PATTERNS.iter().zip(SIGNS) {
            let mut letters = string.clone();
            letters.extend(q.iter().copied().zip(pattern.chars()));
            writeln!(out, "{:.6} {}", sign * c, word(n, &letters)).unwrap();
        }
    }
    out
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir).expect("create fixtures dir");
    for (name, n, dressed_every, doubles, seed) in [
        ("chem6.ham", 6, 1, 8, 6001),
        ("chem7.ham", 7, 1, 6, 7001),
        ("chem8.ham", 8, 2, 6, 8001),
    ] {
        let path = dir.join(name);
        fs::write(&path, chemistry_like(n, dressed_every, doubles, seed)).expect("write fixture");
        println!("wrote {}", path.display());
    }
}
