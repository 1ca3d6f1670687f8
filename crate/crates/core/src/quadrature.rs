//! Adaptive Gauss-Kronrod (7/15) quadrature on finite and semi-infinite ranges.

use crate::error::{Error, Result};
use crate::scalar::Real;

// Kronrod abscissae on [0, 1], descending; odd indices are the Gauss-Legendre nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-9),
            max_subdivisions: 500,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) {
            return Err(Error::InvalidConfig("abs_tol must be positive".into()));
        }
        if !(self.rel_tol >= T::lit(1e-12)) {
            return Err(Error::InvalidConfig(
                "rel_tol must be at least 1e-12".into(),
            ));
        }
        if self.max_subdivisions < 50 {
            return Err(Error::InvalidConfig(
                "max_subdivisions must be at least 50".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half_len,
        error: ((kronrod - gauss) * half_len).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// error meets `max(abs_tol, rel_tol * |value|)`. Running out of subdivisions
/// or producing a non-finite value is an error.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    spec.validate()?;
    let mut segments = vec![gauss_kronrod(&mut f, a, b)];
    loop {
        let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        if !value.is_finite() || !error.is_finite() {
            return Err(non_convergence(spec, value, error));
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                subdivisions: segments.len(),
            });
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(non_convergence(spec, value, error));
        }
        let worst = segments.iter().enumerate().fold(0, |best, (i, s)| {
            if s.error > segments[best].error {
                i
            } else {
                best
            }
        });
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        segments.push(gauss_kronrod(&mut f, seg.a, mid));
        segments.push(gauss_kronrod(&mut f, mid, seg.b));
    }
}

/// Integrates `f` over `[a, inf)` through the map `x = a + t / (1 - t)`, `t in [0, 1)`.
pub fn integrate_to_infinity<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T>> {
    let mapped = |t: T| {
        let s = T::one() - t;
        let v = f(a + t / s) / (s * s);
        // The Kronrod nodes never touch t = 1, but the integrand may still
        // decay slower than the Jacobian grows near it.
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    integrate(mapped, T::zero(), T::one(), spec)
}

fn non_convergence<T: Real>(spec: &QuadratureSpec<T>, value: T, error: T) -> Error {
    Error::QuadratureNonConvergence {
        max_subdivisions: spec.max_subdivisions,
        estimate: value.as_f64(),
        error: error.as_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact_in_one_panel() {
        let spec = QuadratureSpec::default();
        let est = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, &spec).unwrap();
        assert_relative_eq!(est.value, 64.0 / 6.0 - 4.0, max_relative = 1e-14);
        assert_eq!(est.subdivisions, 1);
    }

    #[test]
    fn semi_infinite_integrals() {
        let spec = QuadratureSpec::default();
        let gauss = integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0, &spec).unwrap();
        assert_relative_eq!(gauss.value, PI.sqrt() / 2.0, max_relative = 1e-10);
        // x / (1 + x^4) from a: (pi/2 - atan(a^2)) / 2
        for a in [0.0, 0.3, 2.0] {
            let est = integrate_to_infinity(|x: f64| x / (1.0 + x.powi(4)), a, &spec).unwrap();
            assert_relative_eq!(
                est.value,
                0.5 * (PI / 2.0 - (a * a).atan()),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn kinked_integrand_needs_subdivision() {
        let spec = QuadratureSpec::default();
        let est = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &spec).unwrap();
        assert_relative_eq!(est.value, 0.5 * (0.09 + 0.49), max_relative = 1e-9);
        assert!(est.subdivisions > 1);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let spec = QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_subdivisions: 50,
        };
        let res = integrate(|x: f64| (1.0 / x).sin(), 1e-8, 1.0, &spec);
        assert!(matches!(
            res,
            Err(Error::QuadratureNonConvergence {
                max_subdivisions: 50,
                ..
            })
        ));
    }

    #[test]
    fn spec_bounds_are_enforced() {
        let tight = QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-13,
            max_subdivisions: 100,
        };
        assert!(tight.validate().is_err());
        let short = QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 10,
        };
        assert!(short.validate().is_err());
        assert!(QuadratureSpec::<f64>::default().validate().is_ok());
    }
}
