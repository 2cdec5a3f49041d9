use crate::error::{Error, Result};
use crate::interp::KernelBasis;
use crate::naive::{naive_equation, Axis};
use crate::poly::{Polynomial, Ring};

/// The six quintics in kernel-file form.
pub const SHIPPED_QUINTICS: &str = include_str!("../../data/quintics.txt");

/// Defining equations of `Z_4`: six quintics and three octics.
#[derive(Clone, Debug)]
pub struct Equations {
    pub quintics: Vec<Polynomial>,
    pub octics: Vec<Polynomial>,
}

impl Equations {
    /// Shipped quintics with the column octics `C12, C13, C23`.
    pub fn shipped() -> Result<Self> {
        Self::from_quintic_text(SHIPPED_QUINTICS)
    }

    pub fn from_quintic_text(text: &str) -> Result<Self> {
        let kb = KernelBasis::from_text(text)?;
        let quintics = kb
            .polynomials()
            .ok_or_else(|| Error::Invalid("equations must be an exact kernel file".into()))?
            .to_vec();
        Self::new(quintics, octics(Axis::Column)?)
    }

    pub fn new(quintics: Vec<Polynomial>, octics: Vec<Polynomial>) -> Result<Self> {
        let ring = Ring::projective(4);
        for (f, d) in quintics.iter().map(|f| (f, 5)).chain(octics.iter().map(|f| (f, 8))) {
            if f.ring().as_ref() != ring.as_ref() {
                return Err(Error::RingMismatch);
            }
            if f.homogeneous_degree() != Some(d) {
                return Err(Error::Invalid(format!("expected a form of degree {d}")));
            }
        }
        Ok(Equations { quintics, octics })
    }
}

/// `C12, C13, C23` (or `R12, R13, R23`) for `n = 4`.
pub fn octics(axis: Axis) -> Result<Vec<Polynomial>> {
    [(1, 2), (1, 3), (2, 3)].iter().map(|&(i, j)| naive_equation(4, axis, i, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_equations_load() {
        let e = Equations::shipped().unwrap();
        assert_eq!(e.quintics.len(), 6);
        assert_eq!(e.octics.len(), 3);
        assert!(e.quintics.iter().all(|q| q.is_normalized()));
        assert_eq!(e.octics[0].num_terms(), 967);
    }
}
