use nalgebra::DMatrix;

use crate::qcore::{Operator, C64};

/// Scaled norm at or below which the Taylor kernel is applied.
const THETA: f64 = 0.5;
/// Taylor order; the remainder at ‖X‖ ≤ 0.5 is below 0.5^19/19! ≈ 1.6e-23.
const ORDER: usize = 18;

/// Matrix exponential exp(scale · a) by scaling and squaring around a
/// fixed-order Taylor kernel.
pub fn expm(a: &Operator, scale: C64) -> Operator {
    let n = a.side();
    if scale == C64::new(0.0, 0.0) {
        return Operator::identity(a.dims());
    }
    let x = a.matrix() * scale;
    let norm = x
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);

    let squarings = if norm > THETA {
        (norm / THETA).log2().ceil() as u32
    } else {
        0
    };
    let x = x * C64::new(0.5f64.powi(squarings as i32), 0.0);

    // Horner evaluation of Σ_{k≤ORDER} X^k / k!
    let ident = DMatrix::<C64>::identity(n, n);
    let mut result = ident.clone();
    for k in (1..=ORDER).rev() {
        result = &ident + (&x * &result) * C64::new(1.0 / k as f64, 0.0);
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Operator::new(result, a.dims().to_vec()).expect("shape preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{c64, pauli};

    #[test]
    fn zero_exponent_is_identity() {
        let a = pauli::sigma_y();
        assert_eq!(expm(&a, c64(0.0, 0.0)), Operator::identity(&[2]));
    }

    #[test]
    fn pauli_rotation() {
        // exp(-iπ/2 σx) = -i σx
        let u = expm(&pauli::sigma_x(), c64(0.0, -std::f64::consts::FRAC_PI_2));
        let expected = pauli::sigma_x().scale(c64(0.0, -1.0));
        assert!((&u - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn large_norm_real_diagonal() {
        let a = Operator::diagonal(&[c64(3.0, 0.0), c64(-7.5, 0.0)]);
        let e = expm(&a, c64(1.0, 0.0));
        assert!((e.get(0, 0).re / 3f64.exp() - 1.0).abs() < 1e-12);
        assert!((e.get(1, 1).re / (-7.5f64).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_is_exact() {
        // exp(t N) = I + t N for N² = 0
        let n = pauli::sigma_plus();
        let e = expm(&n, c64(2.5, 0.0));
        assert!((e.get(1, 0) - c64(2.5, 0.0)).norm() < 1e-14);
        assert!((e.get(0, 0) - c64(1.0, 0.0)).norm() < 1e-14);
    }
}
