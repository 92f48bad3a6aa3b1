//! Explicit distortion bounds for quasiconformal images of inscribed balls,
//! as functions of the declared distortion Q, the embedding coefficient C_r,
//! the dimension and the capacity lower-bound constant C(n).
//!
//! The formulas are evaluated verbatim from their source, including three
//! oddities kept on purpose (they only loosen the bounds, which stay valid
//! envelopes): the interior-dilatation bound carries no Q factor, the ratio
//! upper bound carries no Q factor either, and C0 carries the sphere-area
//! factor twice. Each oddity is echoed in the report notes.

use crate::capacity::sphere_area;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct BoundsInput {
    pub q: f64,
    pub c_r: f64,
    pub n: usize,
    pub cn: f64,
}

impl BoundsInput {
    pub fn new(q: f64, c_r: f64, n: usize, cn: f64) -> Result<Self> {
        let input = BoundsInput { q, c_r, n, cn };
        input.validate()?;
        Ok(input)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        if !(self.q >= 1.0) {
            return Err(Error::OutOfDomain(format!(
                "distortion Q must be at least 1, got {}",
                self.q
            )));
        }
        if !(self.cn > 0.0 && self.cn.is_finite()) {
            return Err(Error::OutOfDomain(format!(
                "capacity constant Cn must be positive, got {}",
                self.cn
            )));
        }
        if !(self.c_r >= 1.0) {
            return Err(Error::OutOfDomain(format!(
                "embedding coefficient C_r must exceed 1, got {}",
                self.c_r
            )));
        }
        Ok(())
    }

    fn require_cr_above_one(&self) -> Result<()> {
        if self.c_r <= 1.0 {
            return Err(Error::OutOfDomain(format!(
                "embedding coefficient C_r must exceed 1, got {}",
                self.c_r
            )));
        }
        Ok(())
    }
}

/// Upper bound for the interior dilatation of the image of an inscribed
/// ball: exp[{w / (Cn * min[ln 2, min(C_r-1, 1) ln(1 + 2(C_r-1))])}^(1/(n-1))].
/// Degenerates to the infinity sentinel at C_r = 1.
pub fn prop3_bound(input: &BoundsInput) -> Result<f64> {
    input.validate()?;
    let w = sphere_area(input.n)?;
    let t = input.c_r - 1.0;
    let min_term = (2.0f64.ln()).min(t.min(1.0) * (1.0 + 2.0 * t).ln());
    if min_term <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((w / (input.cn * min_term)).powf(1.0 / (input.n - 1) as f64).exp())
}

/// Upper bound for delta / dist of the image ball, given its measured
/// interior dilatation: K_r^(-1) * exp[w / (Cn * (ln C_r)^(n-1))].
pub fn prop4_factor(k_r: f64, input: &BoundsInput) -> Result<f64> {
    input.validate()?;
    input.require_cr_above_one()?;
    if !(k_r >= 1.0) {
        return Err(Error::OutOfDomain(format!(
            "interior dilatation K_r must be at least 1, got {k_r}"
        )));
    }
    let w = sphere_area(input.n)?;
    let log_pow = input.c_r.ln().powi(input.n as i32 - 1);
    Ok((w / (input.cn * log_pow)).exp() / k_r)
}

/// Lower-bound constants: C0 = (Q w / Cn) * w * [ln(1 + 1/(C_r-1))]^(-1)
/// and C3 = [exp(C0^(1/(n-1))) - 1]^(-1), so that delta >= C3 * dist.
/// C3 is mathematically positive but rounds to zero once the exponent
/// overflows (C0 beyond roughly 700 in the plane); the lower bound is then
/// vacuous rather than wrong.
pub fn prop5_constant(input: &BoundsInput) -> Result<(f64, f64)> {
    input.validate()?;
    input.require_cr_above_one()?;
    let w = sphere_area(input.n)?;
    let log_term = (1.0 + 1.0 / (input.c_r - 1.0)).ln();
    let c0 = (input.q * w / input.cn) * w / log_term;
    let c3 = 1.0 / ((c0.powf(1.0 / (input.n - 1) as f64)).exp() - 1.0);
    Ok((c0, c3))
}

#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub input: BoundsInput,
    /// Interior-dilatation cap for image balls.
    pub k_r_bound: f64,
    /// Ratio cap evaluated at K_r = 1 (its largest value; the factor is
    /// decreasing in the measured dilatation).
    pub delta_upper_factor: f64,
    pub c0: f64,
    pub c3: f64,
    pub notes: Vec<&'static str>,
}

pub fn bounds_report(input: &BoundsInput) -> Result<BoundsReport> {
    input.validate()?;
    input.require_cr_above_one()?;
    let k_r_bound = prop3_bound(input)?;
    let delta_upper_factor = prop4_factor(1.0, input)?;
    let (c0, c3) = prop5_constant(input)?;
    Ok(BoundsReport {
        input: *input,
        k_r_bound,
        delta_upper_factor,
        c0,
        c3,
        notes: vec![
            "the dilatation bound depends on C_r and n only; Q does not enter",
            "the ratio upper bound likewise carries no Q factor",
            "C0 carries the sphere-area factor twice and the log term to the power -1",
            "C3 is the reciprocal of exp(C0^(1/(n-1))) - 1",
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn planar(q: f64, c_r: f64) -> BoundsInput {
        BoundsInput { q, c_r, n: 2, cn: 2.0 / PI }
    }

    #[test]
    fn frozen_anchor_values() {
        let b = prop3_bound(&planar(1.0, 2.0)).unwrap();
        let expect = (PI * PI / 2.0f64.ln()).exp();
        assert!((b - expect).abs() <= 1e-9 * expect, "{b} vs {expect}");
        assert!((1.52e6..1.55e6).contains(&b));

        // at C_r = 2 the min term equals ln C_r, so the two upper bounds agree
        let f = prop4_factor(1.0, &planar(1.0, 2.0)).unwrap();
        assert!((f - expect).abs() <= 1e-9 * expect);

        let (c0, c3) = prop5_constant(&planar(1.0, 2.0)).unwrap();
        let c0_expect = 2.0 * PI.powi(3) / 2.0f64.ln();
        assert!((c0 - c0_expect).abs() <= 1e-12 * c0_expect, "{c0} vs {c0_expect}");
        assert!((c0 - 89.4648).abs() < 1e-3);
        let c3_expect = 1.0 / (c0_expect.exp() - 1.0);
        assert!((c3 - c3_expect).abs() <= 1e-12 * c3_expect);
        assert!(c3 > 0.0 && c3 < 1.0);
    }

    #[test]
    fn degenerate_embedding_gives_sentinel_or_error() {
        assert_eq!(prop3_bound(&planar(1.0, 1.0)).unwrap(), f64::INFINITY);
        assert!(prop3_bound(&planar(1.0, 0.5)).is_err());
        assert!(prop4_factor(1.0, &planar(1.0, 1.0)).is_err());
        assert!(prop5_constant(&planar(1.0, 1.0)).is_err());
        assert!(prop4_factor(0.5, &planar(1.0, 2.0)).is_err());
        assert!(BoundsInput::new(0.5, 2.0, 2, 1.0).is_err());
        assert!(BoundsInput::new(1.0, 2.0, 1, 1.0).is_err());
        assert!(BoundsInput::new(1.0, 2.0, 2, 0.0).is_err());
    }

    #[test]
    fn near_degenerate_embedding_blows_up() {
        let close = prop3_bound(&planar(1.0, 1.0 + 1e-9)).unwrap();
        assert_eq!(close, f64::INFINITY, "tiny min term overflows the exponential");
        let moderate = prop3_bound(&planar(1.0, 1.2)).unwrap();
        assert!(moderate.is_finite() && moderate > prop3_bound(&planar(1.0, 2.0)).unwrap());
    }

    #[test]
    fn monotonicities() {
        // wider embedding never worsens the dilatation cap
        let b2 = prop3_bound(&planar(1.0, 2.0)).unwrap();
        let b3 = prop3_bound(&planar(1.0, 3.0)).unwrap();
        assert!(b3 <= b2);
        // and a larger capacity constant shrinks it
        let tight = prop3_bound(&BoundsInput { cn: 1.0, ..planar(1.0, 2.0) }).unwrap();
        assert!(tight <= b2);
        // the ratio cap decreases in the measured dilatation
        let f1 = prop4_factor(1.0, &planar(1.0, 2.0)).unwrap();
        let f2 = prop4_factor(2.0, &planar(1.0, 2.0)).unwrap();
        assert!((f2 - f1 / 2.0).abs() <= 1e-9 * f1);
        // the ratio cap tends to 1/K_r from above as the embedding widens
        let wide = prop4_factor(2.0, &planar(1.0, 1e9)).unwrap();
        let wider = prop4_factor(2.0, &planar(1.0, 1e300)).unwrap();
        assert!(wide > 0.5 && wider > 0.5);
        assert!(wider < wide);
        assert!(wider - 0.5 < 0.01);
        // C3 decreases in Q
        let (_, c3_q1) = prop5_constant(&planar(1.0, 2.0)).unwrap();
        let (_, c3_q2) = prop5_constant(&planar(2.0, 2.0)).unwrap();
        assert!(c3_q2 <= c3_q1);
    }

    #[test]
    fn all_bounds_positive_on_parameter_grid() {
        for n in [2usize, 3] {
            let cn = if n == 2 { 2.0 / PI } else { 0.5 };
            for q in [1.0, 2.0, 4.0] {
                for c_r in [1.25, 1.5, 2.0, 4.0] {
                    let input = BoundsInput { q, c_r, n, cn };
                    let report = bounds_report(&input).unwrap();
                    assert!(
                        report.k_r_bound > 0.0,
                        "prop3 at q={q} c_r={c_r} n={n}"
                    );
                    assert!(report.delta_upper_factor.is_finite() && report.delta_upper_factor > 0.0);
                    assert!(report.c0.is_finite() && report.c0 > 0.0);
                    assert!(report.c3 >= 0.0, "c3 at q={q} c_r={c_r} n={n}");
                }
            }
        }
    }
}
