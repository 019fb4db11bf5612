#![allow(dead_code)]

use std::fmt::Write;
use std::path::PathBuf;

use kinexp::io::{parse_config, parse_mechanism, RunConfig};
use kinexp::kinetics::Mechanism;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Toy mechanism, its config and the initial state.
pub fn toy() -> (Mechanism, RunConfig, Vec<f64>) {
    let mech = parse_mechanism(&read_fixture("toy_ignition.mech")).unwrap();
    let cfg = parse_config(&read_fixture("toy_ignition.cfg")).unwrap();
    let y0 = cfg.initial_state(&mech).unwrap();
    (mech, cfg, y0)
}

/// Least-squares slope of `ys` against `xs`.
pub fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random orthogonal matrix from the QR factor of a Gaussian-ish matrix.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    g.qr().q()
}

/// Real quasi-diagonal matrix with the given eigenvalues; each complex value
/// must be followed by its conjugate and becomes a 2x2 rotation block.
pub fn block_diagonal(eigs: &[(f64, f64)]) -> DMatrix<f64> {
    let n = eigs.len();
    let mut d = DMatrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        let (re, im) = eigs[i];
        if im == 0.0 {
            d[(i, i)] = re;
            i += 1;
        } else {
            d[(i, i)] = re;
            d[(i + 1, i + 1)] = re;
            d[(i, i + 1)] = im;
            d[(i + 1, i)] = -im;
            i += 2;
        }
    }
    d
}

/// Eigenvalues with real parts in `[re_lo, re_hi]`; about a quarter of them
/// come in conjugate pairs with imaginary part up to `im_max`.
pub fn random_spectrum(rng: &mut impl Rng, n: usize, re_lo: f64, re_hi: f64, im_max: f64) -> Vec<(f64, f64)> {
    let mut eigs = Vec::with_capacity(n);
    while eigs.len() < n {
        let re = rng.gen_range(re_lo..=re_hi);
        if eigs.len() + 2 <= n && im_max > 0.0 && rng.gen_bool(0.25) {
            let im = rng.gen_range(1.0..=im_max);
            eigs.push((re, im));
            eigs.push((re, -im));
        } else {
            eigs.push((re, 0.0));
        }
    }
    eigs
}

/// `Q D Q^T` with `D` from [`block_diagonal`].
pub fn matrix_with_spectrum(rng: &mut impl Rng, eigs: &[(f64, f64)]) -> DMatrix<f64> {
    let q = random_orthogonal(rng, eigs.len());
    &q * block_diagonal(eigs) * q.transpose()
}

const ATOMS: [&str; 4] = ["H", "O", "C", "N"];

fn coeffs(rng: &mut impl Rng) -> [f64; 7] {
    // cp/R strictly positive and modest over [200, 6000] K.
    [
        rng.gen_range(2.5..5.0),
        rng.gen_range(0.0..1e-4),
        rng.gen_range(-1e-8..1e-8),
        0.0,
        0.0,
        rng.gen_range(-5e4..5e4),
        rng.gen_range(-5.0..20.0),
    ]
}

fn write_coeffs(out: &mut String, c: &[f64; 7]) {
    for v in c {
        let _ = write!(out, " {v:e}");
    }
}

/// Random valid mechanism text: a few "atom" species, composites built from
/// them, and mass-balanced association/dissociation reactions.
pub fn random_mechanism_text(rng: &mut impl Rng) -> String {
    let n_base = rng.gen_range(1..=4);
    let mut species: Vec<(String, Vec<usize>)> = Vec::new();
    for a in ATOMS.iter().take(n_base) {
        species.push((a.to_string(), vec![species.len()]));
    }
    let masses: Vec<f64> = (0..n_base).map(|_| rng.gen_range(1..=40) as f64 * 1e-3).collect();
    let n_comp = rng.gen_range(0..=5);
    for k in 0..n_comp {
        let parts: Vec<usize> = (0..rng.gen_range(2..=3)).map(|_| rng.gen_range(0..n_base)).collect();
        species.push((format!("X{k}_{}", parts.len()), parts));
    }
    let mut out = String::from("format 1\n\n[species]\n");
    for (name, parts) in &species {
        let w: f64 = parts.iter().map(|&p| masses[p]).sum();
        let _ = write!(out, "{name} {w:e} 200 1000 6000 |");
        let lo = coeffs(rng);
        write_coeffs(&mut out, &lo);
        if rng.gen_bool(0.5) {
            // Same cp polynomial on both ranges keeps cp continuous at T_mid.
            let mut hi = lo;
            hi[5] += rng.gen_range(-100.0..100.0);
            hi[6] += rng.gen_range(-1.0..1.0);
            out.push_str(" |");
            write_coeffs(&mut out, &hi);
        }
        out.push('\n');
    }
    out.push_str("\n[reactions]\n");
    for (name, parts) in species.iter().skip(n_base) {
        let mut counts = vec![0u32; n_base];
        for &p in parts {
            counts[p] += 1;
        }
        let lhs: Vec<String> = counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| if *c == 1 { ATOMS[i].to_string() } else { format!("{c} {}", ATOMS[i]) })
            .collect();
        let arrow = if rng.gen_bool(0.5) { "<=>" } else { "=>" };
        let _ = write!(
            out,
            "{} {arrow} {name}  {:e} {} {:e}",
            lhs.join(" + "),
            rng.gen_range(1.0..1e12),
            rng.gen_range(-2..=2),
            rng.gen_range(0.0..2e5)
        );
        if arrow == "<=>" && rng.gen_bool(0.3) {
            let _ = write!(out, "  rev: {:e} 0 {:e}", rng.gen_range(1.0..1e6), rng.gen_range(0.0..1e5));
        }
        out.push('\n');
    }
    out
}
