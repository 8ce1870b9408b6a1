#![allow(dead_code)]

use nalgebra::DMatrix;
use qcollide::collision::apply_collision_map;
use qcollide::qcore::{c64, DensityMatrix, Operator, C64};
use rand::Rng;

pub fn random_operator<R: Rng>(rng: &mut R, d: usize) -> Operator {
    let m = DMatrix::from_fn(d, d, |_, _| {
        c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    Operator::from_matrix(m).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> Operator {
    random_operator(rng, d).hermitian_part()
}

/// A A† / Tr(A A†) for a random square A: full rank almost surely.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    let a = random_operator(rng, d);
    let p = &a * &a.dagger();
    let tr = p.trace().re;
    DensityMatrix::new(p.scale_real(1.0 / tr)).unwrap()
}

pub fn matrix_unit(d: usize, j: usize, k: usize) -> Operator {
    let mut m = DMatrix::zeros(d, d);
    m[(j, k)] = c64(1.0, 0.0);
    Operator::from_matrix(m).unwrap()
}

/// Superoperator (row-major vec) of `k` repeated collisions.
pub fn repeated_superop(eta: &DensityMatrix, u: &Operator, d: usize, k: usize) -> DMatrix<C64> {
    let mut s = DMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for l in 0..d {
            let mut x = matrix_unit(d, j, l);
            for _ in 0..k {
                x = apply_collision_map(&x, eta, u).unwrap();
            }
            for r in 0..d * d {
                s[(r, j * d + l)] = x.get(r / d, r % d);
            }
        }
    }
    s
}
