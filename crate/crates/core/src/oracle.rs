//! Success probabilities by direct numerical integration of the
//! stochastic-geometry expressions, independent of the closed forms.
//!
//! The aggregate interference at a typical receiver has two independent
//! Poisson fields: uplink MUs with density `lambda_b` and unit power, and the
//! other sources with density `lambda_s` and power `mu`. Under Rayleigh
//! fading each field contributes a factor
//! `exp(-2 pi lambda \int_r^inf (1 - 1 / (1 + w y^-alpha)) y dy)`
//! to the Laplace transform, where `r` is the exclusion radius of the field.

use crate::config::{Mode, NetworkConfig};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, QuadratureSpec};
use crate::scalar::Real;

/// `\int_r^inf (1 - 1/(1 + w y^-alpha)) y dy`, by adaptive quadrature.
///
/// Substituting `y = w^(1/alpha) u` leaves `w^(2/alpha) \int u / (1 + u^alpha) du`,
/// which keeps the integrand on a fixed scale whatever the value of `w`.
/// The tail beyond `u = 1` is integrated in `v = 1/u`, where it becomes
/// `v^(alpha-3) / (1 + v^alpha)` on a finite range.
pub fn field_integral<T: Real>(
    w: T,
    alpha: T,
    exclusion: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    if w <= T::zero() {
        return Ok(T::zero());
    }
    let scale = w.powf(alpha.recip());
    let lower = exclusion / scale;
    let split = lower.max(T::one());
    let head = if lower < split {
        integrate(|u: T| u / (T::one() + u.powf(alpha)), lower, split, spec)?.value
    } else {
        T::zero()
    };
    let three = T::lit(3.0);
    let tail = integrate(
        |v: T| v.powf(alpha - three) / (T::one() + v.powf(alpha)),
        T::zero(),
        split.recip(),
        spec,
    )?;
    Ok(scale * scale * (head + tail.value))
}

/// The same integral for `alpha = 4` through its antiderivative:
/// `sqrt(w) (pi/2 - atan(r^2 / sqrt(w))) / 2`.
pub fn field_integral_alpha4<T: Real>(w: T, exclusion: T) -> T {
    if w <= T::zero() {
        return T::zero();
    }
    let root = w.sqrt();
    T::lit(0.5) * root * (T::FRAC_PI_2() - (exclusion * exclusion / root).atan())
}

fn check_args<T: Real>(cfg: &NetworkConfig<T>, mu: T, z: T) -> Result<()> {
    if !(cfg.alpha > T::lit(2.0)) {
        return Err(Error::InvalidConfig(format!(
            "alpha must exceed 2, got {}",
            cfg.alpha
        )));
    }
    if !(mu >= T::zero() && mu.is_finite()) {
        return Err(Error::InvalidPower(mu.as_f64()));
    }
    if !(z >= T::zero() && z.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "Laplace argument must be nonnegative, got {z}"
        )));
    }
    Ok(())
}

/// Laplace transform of the aggregate interference at `z`, with interfering
/// sources restricted to distances beyond `source_exclusion`.
pub fn laplace_interference<T: Real>(
    cfg: &NetworkConfig<T>,
    mu: T,
    z: T,
    source_exclusion: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    check_args(cfg, mu, z)?;
    let two_pi = T::lit(2.0) * T::PI();
    let uplink = field_integral(z, cfg.alpha, T::zero(), spec)?;
    let sources = field_integral(z * mu, cfg.alpha, source_exclusion, spec)?;
    Ok((-two_pi * (cfg.density_bs() * uplink + cfg.density_src() * sources)).exp())
}

/// `alpha = 4` evaluation of [`laplace_interference`] from the antiderivatives.
pub fn laplace_interference_alpha4<T: Real>(
    cfg: &NetworkConfig<T>,
    mu: T,
    z: T,
    source_exclusion: T,
) -> Result<T> {
    cfg.require_closed_form()?;
    check_args(cfg, mu, z)?;
    let two_pi = T::lit(2.0) * T::PI();
    let uplink = field_integral_alpha4(z, T::zero());
    let sources = field_integral_alpha4(z * mu, source_exclusion);
    Ok((-two_pi * (cfg.density_bs() * uplink + cfg.density_src() * sources)).exp())
}

/// Unicast: the receiver is the MU nearest to its source, so the other
/// sources are unconstrained relative to the receiver.
pub fn laplace_interference_unicast<T: Real>(
    cfg: &NetworkConfig<T>,
    mu: T,
    z: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    laplace_interference(cfg, mu, z, T::zero(), spec)
}

/// Broadcast: the MU is served by its nearest source at `serving_dist`,
/// so every other source lies farther away.
pub fn laplace_interference_broadcast<T: Real>(
    cfg: &NetworkConfig<T>,
    mu: T,
    z: T,
    serving_dist: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    laplace_interference(cfg, mu, z, serving_dist, spec)
}

/// Success probability `E_X[L_I(beta X^alpha / mu)]` with `X` the nearest-neighbour
/// distance in a Poisson field of density `lambda_u` (unicast) or `lambda_s` (broadcast).
pub fn p_suc_numeric<T: Real>(
    cfg: &NetworkConfig<T>,
    mu: T,
    mode: Mode,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    cfg.validate()?;
    if !(mu > T::zero() && mu.is_finite()) {
        return Err(Error::InvalidPower(mu.as_f64()));
    }
    let density = match mode {
        Mode::Unicast => cfg.density_mu(),
        Mode::Broadcast => cfg.density_src(),
    };
    // x = s / sqrt(pi lambda) turns the distance density into 2 s exp(-s^2).
    let length = (T::PI() * density).sqrt().recip();
    let mut failure = None;
    let integrand = |s: T| {
        if failure.is_some() {
            return T::zero();
        }
        let x = s * length;
        let z = cfg.beta * x.powf(cfg.alpha) / mu;
        let lt = match mode {
            Mode::Unicast => laplace_interference_unicast(cfg, mu, z, spec),
            Mode::Broadcast => laplace_interference_broadcast(cfg, mu, z, x, spec),
        };
        match lt {
            Ok(v) => v * T::lit(2.0) * s * (-s * s).exp(),
            Err(e) => {
                failure = Some(e);
                T::zero()
            }
        }
    };
    let est = integrate_to_infinity(integrand, T::zero(), spec);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use approx::assert_relative_eq;

    fn fig2() -> NetworkConfig<f64> {
        NetworkConfig::fig2()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn laplace_at_zero_is_one() {
        let cfg = fig2();
        assert_eq!(
            laplace_interference_unicast(&cfg, 0.064, 0.0, &spec()).unwrap(),
            1.0
        );
        assert_eq!(
            laplace_interference_broadcast(&cfg, 0.064, 0.0, 150.0, &spec()).unwrap(),
            1.0
        );
    }

    #[test]
    fn no_interferers_means_no_attenuation() {
        // Densities of zero are outside a valid NetworkConfig, so shrink them instead:
        // a huge area drives both densities to zero.
        let cfg = NetworkConfig {
            area: 1e300,
            ..fig2()
        };
        for z in [1.0, 1e6, 1e12] {
            let v = laplace_interference_unicast(&cfg, 0.064, z, &spec()).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn zero_power_silences_source_field() {
        let cfg = fig2();
        let z = 1e10;
        let both = laplace_interference_broadcast(&cfg, 0.0, z, 0.0, &spec()).unwrap();
        let uplink_only =
            (-2.0 * std::f64::consts::PI * cfg.density_bs() * field_integral_alpha4(z, 0.0)).exp();
        assert_relative_eq!(both, uplink_only, max_relative = 1e-9);
    }

    #[test]
    fn quadrature_matches_antiderivative() {
        let cfg = fig2();
        for &z in &[1e-3, 1.0, 3.7e4, 2.5e9, 1e13] {
            for &excl in &[0.0, 12.0, 480.0, 3000.0] {
                let numeric = laplace_interference(&cfg, 0.3, z, excl, &spec()).unwrap();
                let closed = laplace_interference_alpha4(&cfg, 0.3, z, excl).unwrap();
                assert_relative_eq!(numeric, closed, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn field_integral_general_alpha() {
        // \int_0^inf u/(1+u^a) du = (pi/a) / sin(2 pi / a)
        let s = spec();
        for a in [2.5, 3.0, 3.5, 5.0_f64] {
            let expected = (std::f64::consts::PI / a) / (2.0 * std::f64::consts::PI / a).sin();
            assert_relative_eq!(
                field_integral(1.0, a, 0.0, &s).unwrap(),
                expected,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn laplace_is_nonincreasing_in_z() {
        let cfg = NetworkConfig {
            alpha: 3.5,
            ..fig2()
        };
        let mut prev = 1.0;
        for i in 0..40 {
            let z = 10f64.powf(i as f64 * 0.3 - 2.0);
            let v = laplace_interference_broadcast(&cfg, 0.064, z, 25.0, &spec()).unwrap();
            assert!(v > 0.0 && v <= prev, "z={z} v={v} prev={prev}");
            prev = v;
        }
    }

    #[test]
    fn numeric_success_matches_closed_form_fig2() {
        let cfg = fig2();
        let pb = p_suc_numeric(&cfg, 0.064, Mode::Broadcast, &spec()).unwrap();
        let pu = p_suc_numeric(&cfg, 0.064, Mode::Unicast, &spec()).unwrap();
        assert_relative_eq!(pb, 0.070_404_520_104_435_42, max_relative = 1e-6);
        assert_relative_eq!(pu, 0.877_277_388_399_231_9, max_relative = 1e-6);
        assert_relative_eq!(
            pb,
            analytic::p_suc_broadcast(&cfg, 0.064).unwrap(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn zero_beta_integrates_to_one() {
        let cfg = NetworkConfig {
            beta: 0.0,
            alpha: 3.0,
            ..fig2()
        };
        for mode in [Mode::Unicast, Mode::Broadcast] {
            let p = p_suc_numeric(&cfg, 0.5, mode, &spec()).unwrap();
            assert_relative_eq!(p, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = fig2();
        assert!(p_suc_numeric(&cfg, 0.0, Mode::Broadcast, &spec()).is_err());
        assert!(laplace_interference_unicast(&cfg, 0.1, -1.0, &spec()).is_err());
        let tight = QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-14,
            max_subdivisions: 500,
        };
        assert!(matches!(
            p_suc_numeric(&cfg, 0.1, Mode::Broadcast, &tight),
            Err(Error::InvalidConfig(_))
        ));
    }
}
