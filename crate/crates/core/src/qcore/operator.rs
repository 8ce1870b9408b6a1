use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::C64;

/// Dense complex square matrix tagged with the dimensions of the subsystems
/// it acts on. Subsystem 0 is the most significant factor of the row index.
#[derive(Clone, PartialEq)]
pub struct Operator {
    data: DMatrix<C64>,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(data: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "subsystem dimensions must be non-empty and positive, got {dims:?}"
            )));
        }
        if !data.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let side: usize = dims.iter().product();
        if side != data.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} imply side {side}, matrix side is {}",
                data.nrows()
            )));
        }
        Ok(Self { data, dims })
    }

    /// Single-subsystem operator from a square matrix.
    pub fn from_matrix(data: DMatrix<C64>) -> Result<Self> {
        let n = data.nrows();
        Self::new(data, vec![n])
    }

    /// Builds a single-subsystem operator from row-major entries.
    pub fn from_rows(side: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != side * side {
            return Err(Error::DimensionMismatch(format!(
                "{} entries cannot fill a {side}x{side} matrix",
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(side, side, entries))
    }

    /// Builds a single-subsystem operator from real row-major entries.
    pub fn from_real_rows(side: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(side, &c)
    }

    pub fn identity(dims: &[usize]) -> Self {
        let side = dims.iter().product();
        Self {
            data: DMatrix::identity(side, side),
            dims: dims.to_vec(),
        }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let side = dims.iter().product();
        Self {
            data: DMatrix::zeros(side, side),
            dims: dims.to_vec(),
        }
    }

    /// Outer product |ket><bra| of two vectors on the same subsystem layout.
    pub fn outer(ket: &[C64], bra: &[C64], dims: &[usize]) -> Result<Self> {
        let side = ket.len();
        if bra.len() != side {
            return Err(Error::DimensionMismatch(format!(
                "outer product of lengths {side} and {}",
                bra.len()
            )));
        }
        let data = DMatrix::from_fn(side, side, |r, c| ket[r] * bra[c].conj());
        Self::new(data, dims.to_vec())
    }

    /// Diagonal single-subsystem operator.
    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut data = DMatrix::zeros(n, n);
        for (k, &x) in entries.iter().enumerate() {
            data[(k, k)] = x;
        }
        Self {
            data,
            dims: vec![n],
        }
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.data.nrows()
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    /// Replaces the subsystem structure, keeping the matrix.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.data, dims)
    }

    pub fn dagger(&self) -> Self {
        Self {
            data: self.data.adjoint(),
            dims: self.dims.clone(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: &self.data * s,
            dims: self.dims.clone(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.data
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.side();
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.data[(r, c)] - self.data[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        let data = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        Self {
            data,
            dims: self.dims.clone(),
        }
    }

    /// Kronecker product; subsystem lists concatenate.
    pub fn tensor(&self, other: &Operator) -> Operator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Operator {
            data: self.data.kronecker(&other.data),
            dims,
        }
    }

    /// Left-fold tensor product `((a ⊗ b) ⊗ c) ⊗ ...`.
    pub fn tensor_all<'a, I>(ops: I) -> Option<Operator>
    where
        I: IntoIterator<Item = &'a Operator>,
    {
        let mut it = ops.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, op| acc.tensor(op)))
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        self * other - other * self
    }

    pub fn anticommutator(&self, other: &Operator) -> Operator {
        self * other + other * self
    }

    fn check_same_shape(&self, other: &Operator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    /// Product that reports a dimension mismatch instead of panicking.
    pub fn try_mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(self * other)
    }

    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(self + other)
    }

    /// Tr(self · rho).
    pub fn expectation(&self, rho: &Operator) -> C64 {
        // Tr(AB) = Σ_ij A_ij B_ji
        let n = self.side();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.data[(i, j)] * rho.data[(j, i)];
            }
        }
        acc
    }

    /// Matrix element <i| A |j> between row-major basis vectors.
    pub fn sandwich(&self, bra: &[C64], ket: &[C64]) -> C64 {
        bra.iter()
            .enumerate()
            .map(|(r, b)| {
                let row: C64 = ket
                    .iter()
                    .enumerate()
                    .map(|(c, k)| self.data[(r, c)] * k)
                    .sum();
                b.conj() * row
            })
            .sum()
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator(dims={:?}) {}", self.dims, self.data)
    }
}

// Panicking arithmetic on mismatched operators mirrors nalgebra's own
// behaviour; use `try_mul`/`try_add` where shapes come from user input.

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator dims differ in product");
        Operator {
            data: &self.data * &rhs.data,
            dims: self.dims.clone(),
        }
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        &self * &rhs
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator dims differ in sum");
        Operator {
            data: &self.data + &rhs.data,
            dims: self.dims.clone(),
        }
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator dims differ in difference");
        Operator {
            data: &self.data - &rhs.data,
            dims: self.dims.clone(),
        }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            data: -&self.data,
            dims: self.dims.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::pauli;

    #[test]
    fn rejects_bad_dims() {
        assert!(Operator::new(DMatrix::zeros(4, 4), vec![2, 3]).is_err());
        assert!(Operator::new(DMatrix::zeros(4, 4), vec![]).is_err());
        assert!(Operator::new(DMatrix::zeros(4, 4), vec![4, 0]).is_err());
        assert!(Operator::new(DMatrix::zeros(3, 4), vec![3]).is_err());
        assert!(Operator::new(DMatrix::zeros(4, 4), vec![2, 2]).is_ok());
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = Operator::identity(&[2]);
        let i4 = i2.tensor(&i2);
        assert_eq!(i4.dims(), &[2, 2]);
        assert_eq!(i4.matrix(), &DMatrix::<C64>::identity(4, 4));
    }

    #[test]
    fn sigma_z_tensor_identity() {
        let zi = pauli::sigma_z().tensor(&Operator::identity(&[2]));
        let expected = Operator::diagonal(&[1.0, 1.0, -1.0, -1.0].map(|x| C64::new(x, 0.0)));
        assert_eq!(zi.matrix(), expected.matrix());
    }

    #[test]
    fn commutator_of_paulis() {
        // [σx, σy] = 2iσz
        let c = pauli::sigma_x().commutator(&pauli::sigma_y());
        let expected = pauli::sigma_z().scale(C64::new(0.0, 2.0));
        assert!((&c - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn try_mul_reports_mismatch() {
        let a = Operator::identity(&[2]);
        let b = Operator::identity(&[3]);
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(_))));
    }
}
