//! Membership algebra for convex blending.
//!
//! Everything here is plain convex bookkeeping: two-element weight pairs
//! produced either by a saturation ramp over an interval or by the exact
//! convex coordinates of a bounded nonlinearity between its sector bounds,
//! plus product composition and convex combination of vertex quantities.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance on the sum of a membership vector.
pub const SUM_TOL: f64 = 1e-12;

/// Shape of the interpolation ramp between two vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampShape {
    /// Piecewise-linear saturation ramp.
    #[default]
    Linear,
    /// Cubic smoothstep (C1 at both ends of the ramp band).
    Smoothstep,
}

/// A saturation ramp over `[lo, hi]`.
///
/// Below `lo` all weight sits on the first vertex, above `hi` on the second;
/// in between the weight moves linearly (or by smoothstep) from one to the
/// other. The two weights always sum to one exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampPair {
    lo: f64,
    hi: f64,
}

impl RampPair {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Domain(format!(
                "ramp bounds must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Weight pair `(w1, w2)` at `x`; `w2` rises from 0 to 1 across the band.
    pub fn weights(&self, x: f64) -> (f64, f64) {
        self.weights_shaped(x, RampShape::Linear)
    }

    /// Weight pair with a selectable ramp shape.
    pub fn weights_shaped(&self, x: f64, shape: RampShape) -> (f64, f64) {
        let t = ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        let w2 = match shape {
            RampShape::Linear => t,
            RampShape::Smoothstep => t * t * (3.0 - 2.0 * t),
        };
        (1.0 - w2, w2)
    }
}

/// Ramp weights at `x` (linear shape). Convenience free function.
pub fn ramp_weights(x: f64, ramp: &RampPair) -> (f64, f64) {
    ramp.weights(x)
}

/// Lower/upper bounds of a scalar nonlinearity over its operating sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBounds {
    lower: f64,
    upper: f64,
}

impl SectorBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(Error::Domain(format!(
                "sector bounds must be finite with lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }
}

/// Exact convex coordinates of a value between its sector bounds.
///
/// Returns `(w1, w2)` with `w1 * lower + w2 * upper == f_value` and
/// `w1 + w2 == 1`. The reconstruction is exact, which is what makes the
/// sector representation of a bounded nonlinearity lossless.
pub fn exact_sector_weights(f_value: f64, bounds: &SectorBounds) -> Result<(f64, f64)> {
    if !(f_value >= bounds.lower && f_value <= bounds.upper) {
        return Err(Error::OutOfSector {
            value: f_value,
            lower: bounds.lower,
            upper: bounds.upper,
        });
    }
    let w1 = (bounds.upper - f_value) / (bounds.upper - bounds.lower);
    Ok((w1, 1.0 - w1))
}

/// A validated vector of convex weights: entries in `[0, 1]`, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVector {
    weights: Vec<f64>,
}

impl MembershipVector {
    /// Validates and wraps raw weights. Entries within `-SUM_TOL` of zero are
    /// clamped to absorb rounding from upstream arithmetic.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Membership("empty weight vector".into()));
        }
        for w in &mut weights {
            if !w.is_finite() {
                return Err(Error::Membership(format!("non-finite weight {w}")));
            }
            if *w < 0.0 {
                if *w < -SUM_TOL {
                    return Err(Error::Membership(format!("negative weight {w}")));
                }
                *w = 0.0;
            } else if *w > 1.0 {
                if *w > 1.0 + SUM_TOL {
                    return Err(Error::Membership(format!("weight {w} exceeds one")));
                }
                *w = 1.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::Membership(format!(
                "weights sum to {sum}, expected 1 within {SUM_TOL}"
            )));
        }
        Ok(Self { weights })
    }

    /// Builds the product memberships of two independent weight pairs, in
    /// lexicographic vertex order: `(a1 b1, a1 b2, a2 b1, a2 b2)`.
    pub fn from_pair_product(a: (f64, f64), b: (f64, f64)) -> Result<Self> {
        Self::new(vec![a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1])
    }

    /// Product composition with another membership vector (outer product,
    /// flattened row-major: index `i * other.len() + j`).
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut w = Vec::with_capacity(self.len() * other.len());
        for a in &self.weights {
            for b in &other.weights {
                w.push(a * b);
            }
        }
        Self::new(w)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}

impl std::ops::Index<usize> for MembershipVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}

/// Convex combination of same-shaped matrices by a membership vector.
pub fn convex_combine(h: &MembershipVector, vertices: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    if h.len() != vertices.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} vertices",
            h.len(),
            vertices.len()
        )));
    }
    let shape = vertices[0].shape();
    let mut out = DMatrix::<f64>::zeros(shape.0, shape.1);
    for (w, v) in h.as_slice().iter().zip(vertices) {
        if v.shape() != shape {
            return Err(Error::Dimension(format!(
                "vertex shape {:?} differs from {:?}",
                v.shape(),
                shape
            )));
        }
        out += v * *w;
    }
    Ok(out)
}

/// Convex combination of scalar vertices.
pub fn convex_combine_scalars(h: &MembershipVector, vertices: &[f64]) -> Result<f64> {
    if h.len() != vertices.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} vertices",
            h.len(),
            vertices.len()
        )));
    }
    Ok(h.as_slice().iter().zip(vertices).map(|(w, v)| w * v).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ramp_weights_saturate_and_interpolate() {
        let ramp = RampPair::new(1.0, 2.0).unwrap();
        assert_eq!(ramp.weights(0.5), (1.0, 0.0));
        assert_eq!(ramp.weights(2.5), (0.0, 1.0));
        let (w1, w2) = ramp.weights(1.5);
        assert!((w1 - 0.5).abs() < 1e-15);
        assert!((w2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ramp_rejects_degenerate_interval() {
        assert!(RampPair::new(2.0, 2.0).is_err());
        assert!(RampPair::new(3.0, 2.0).is_err());
        assert!(RampPair::new(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn smoothstep_matches_linear_at_band_edges() {
        let ramp = RampPair::new(0.0, 1.0).unwrap();
        for x in [-0.3, 0.0, 1.0, 1.7] {
            assert_eq!(
                ramp.weights_shaped(x, RampShape::Smoothstep),
                ramp.weights(x)
            );
        }
        let (_, w2) = ramp.weights_shaped(0.5, RampShape::Smoothstep);
        assert!((w2 - 0.5).abs() < 1e-15); // odd symmetry about the midpoint
    }

    #[test]
    fn exact_sector_weights_reconstruct_value() {
        let bounds = SectorBounds::new(1.0, 10.0).unwrap();
        for i in 0..=1000 {
            let f = 1.0 + 9.0 * (i as f64) / 1000.0;
            let (w1, w2) = exact_sector_weights(f, &bounds).unwrap();
            let rebuilt = w1 * bounds.lower() + w2 * bounds.upper();
            assert!((rebuilt - f).abs() <= 1e-12 * f.abs().max(1.0));
            assert!((w1 + w2 - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn exact_sector_weights_reject_outside_values() {
        let bounds = SectorBounds::new(0.0, 1.0).unwrap();
        assert!(matches!(
            exact_sector_weights(1.5, &bounds),
            Err(Error::OutOfSector { .. })
        ));
        assert!(matches!(
            exact_sector_weights(-0.1, &bounds),
            Err(Error::OutOfSector { .. })
        ));
    }

    #[test]
    fn membership_validation_catches_bad_sums() {
        assert!(MembershipVector::new(vec![0.5, 0.6]).is_err());
        assert!(MembershipVector::new(vec![1.2, -0.2]).is_err());
        assert!(MembershipVector::new(vec![]).is_err());
        assert!(MembershipVector::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn membership_product_preserves_validity() {
        let a = MembershipVector::new(vec![0.3, 0.7]).unwrap();
        let b = MembershipVector::new(vec![0.1, 0.4, 0.5]).unwrap();
        let p = a.product(&b).unwrap();
        assert_eq!(p.len(), 6);
        let sum: f64 = p.as_slice().iter().sum();
        assert!((sum - 1.0).abs() <= SUM_TOL);
    }

    #[test]
    fn convex_combine_scalar_example() {
        let h = MembershipVector::new(vec![0.25; 4]).unwrap();
        let out = convex_combine_scalars(&h, &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((out - 0.5).abs() < 1e-15);
    }

    #[test]
    fn convex_combine_rejects_mismatched_inputs() {
        let h = MembershipVector::new(vec![0.5, 0.5]).unwrap();
        assert!(convex_combine_scalars(&h, &[1.0]).is_err());
        let m = DMatrix::<f64>::identity(2, 2);
        let n = DMatrix::<f64>::identity(3, 3);
        assert!(convex_combine(&h, &[m, n]).is_err());
    }

    #[test]
    fn convex_combine_of_identical_vertices_is_identity() {
        let h = MembershipVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let out = convex_combine(&h, &[m.clone(), m.clone(), m.clone()]).unwrap();
        assert!((out - m).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn ramp_weights_always_convex(x in -1e3f64..1e3, lo in -500.0f64..500.0, width in 1e-6f64..100.0) {
            let ramp = RampPair::new(lo, lo + width).unwrap();
            let (w1, w2) = ramp.weights(x);
            prop_assert!((0.0..=1.0).contains(&w1));
            prop_assert!((0.0..=1.0).contains(&w2));
            prop_assert!((w1 + w2 - 1.0).abs() <= 1e-15);
        }

        #[test]
        fn sector_weights_always_convex(t in 0.0f64..=1.0, lower in -100.0f64..100.0, span in 1e-6f64..100.0) {
            let bounds = SectorBounds::new(lower, lower + span).unwrap();
            let f = lower + t * span;
            let (w1, w2) = exact_sector_weights(f, &bounds).unwrap();
            prop_assert!((0.0..=1.0).contains(&w1));
            prop_assert!((w1 + w2 - 1.0).abs() <= 1e-15);
        }

        #[test]
        fn pair_products_form_valid_memberships(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let h = MembershipVector::from_pair_product((1.0 - a, a), (1.0 - b, b)).unwrap();
            let sum: f64 = h.as_slice().iter().sum();
            prop_assert!((sum - 1.0).abs() <= SUM_TOL);
        }
    }
}
