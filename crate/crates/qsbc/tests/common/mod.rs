//! Shared random-object generators for the integration tests.
//!
//! Everything is driven by an explicit ChaCha generator so failures
//! reproduce exactly.

#![allow(dead_code)]

use qsbc::linalg::{ComplexMatrix, C64};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Standard complex Gaussian entry (Ginibre ensemble building block).
pub fn gaussian_c64<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn random_ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Random Hermitian matrix (G + G†)/2.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(dim, dim, rng);
    g.add(&g.dagger()).unwrap().scale(C64::new(0.5, 0.0))
}

/// Random density operator G·G†/Tr(G·G†) — full rank almost surely.
pub fn random_density<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(dim, dim, rng);
    let p = g.mul(&g.dagger()).unwrap();
    let tr = p.trace().re;
    p.scale(C64::new(1.0 / tr, 0.0))
}

/// Haar-random unitary via Gram–Schmidt of a Ginibre matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for _pass in 0..2 {
            for c in &cols {
                let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= overlap * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Random unit vector (uniform on the sphere).
pub fn random_state_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}
