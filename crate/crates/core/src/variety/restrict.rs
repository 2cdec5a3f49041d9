use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::components::{ComponentDescription, ComponentShape};
use crate::error::{Error, Result};
use crate::naive::{naive_equation, Axis};
use crate::ortho::symbolic_completion;
use crate::poly::{Polynomial, Ring};

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub id: String,
    /// `c` with `K_k|component = c f^2`, or `None` for a zero restriction.
    #[serde(serialize_with = "ser_scalars")]
    pub scalars: Vec<Option<BigRational>>,
    /// Restriction minus its best multiple of `f^2`, for the first mismatch.
    #[serde(skip)]
    pub mismatch: Option<Polynomial>,
}

fn ser_scalars<S: serde::Serializer>(v: &[Option<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&c.as_ref().map(|q| q.to_string()))?;
    }
    seq.end()
}

impl RestrictionReport {
    /// Every nonzero restriction is a positive multiple of `f^2`, and one is
    /// nonzero.
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
            && self.scalars.iter().any(Option::is_some)
            && self.scalars.iter().flatten().all(|c| c > &BigRational::zero())
    }
}

/// Images of the coordinates of `P^9` on an entry-one component, written with
/// the residual `3 x 3` block as the generic completed matrix in the ring of
/// `n = 3`.
pub fn entry_one_parametrization(i: usize, j: usize) -> Result<(std::sync::Arc<Ring>, BTreeMap<usize, Polynomial>)> {
    if !(1..=4).contains(&i) || !(1..=4).contains(&j) {
        return Err(Error::IndexOutOfRange(format!("entry ({i},{j})")));
    }
    let ring3 = Ring::projective(3);
    let w = symbolic_completion(3);
    let rows: Vec<usize> = (1..=4).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (1..=4).filter(|&c| c != j).collect();
    let s = Polynomial::var(&ring3, 4);
    let mut images = BTreeMap::new();
    for r in 1..=3 {
        for c in 1..=3 {
            let img = if r == i && c == j {
                s.clone()
            } else if r == i || c == j {
                Polynomial::zero(&ring3)
            } else {
                let a = rows.iter().position(|&x| x == r).unwrap();
                let b = cols.iter().position(|&x| x == c).unwrap();
                w[a][b].clone()
            };
            images.insert((r - 1) * 3 + (c - 1), img);
        }
    }
    images.insert(9, s);
    Ok((ring3, images))
}

/// `c` with `g = c h`, if any.
fn proportion(g: &Polynomial, h: &Polynomial) -> Option<BigRational> {
    let (m, c) = h.leading_term()?;
    let ratio = g.coefficient(m) / c;
    (g.try_sub(&h.scale(&ratio)).ok()?.is_zero()).then_some(ratio)
}

/// Restricts each octic to an entry-one component and compares with the
/// square of the `n = 3` quartic of the residual block.
pub fn restrict_octics(c: &ComponentDescription, octics: &[Polynomial]) -> Result<RestrictionReport> {
    let ComponentShape::EntryOne { i, j } = c.shape else {
        return Err(Error::Invalid(format!("{} is not an entry-one component", c.id)));
    };
    let (ring3, images) = entry_one_parametrization(i, j)?;
    debug_assert!(c.generators.iter().all(|g| g.substitute(&ring3, &images).unwrap().is_zero()));
    let f2 = naive_equation(3, Axis::Column, 1, 2)?.pow(2);
    let mut scalars = Vec::with_capacity(octics.len());
    let mut mismatch = None;
    for k in octics {
        let r = k.substitute(&ring3, &images)?;
        if r.is_zero() {
            scalars.push(None);
            continue;
        }
        match proportion(&r, &f2) {
            Some(q) => scalars.push(Some(q)),
            None => {
                if mismatch.is_none() {
                    let lead = f2.leading_term().map(|(m, c)| r.coefficient(m) / c).unwrap_or_default();
                    mismatch = Some(r.try_sub(&f2.scale(&lead))?);
                }
                scalars.push(Some(BigRational::zero()));
            }
        }
    }
    Ok(RestrictionReport { id: c.id.clone(), scalars, mismatch })
}
