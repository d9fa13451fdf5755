use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::FidelityCurve;

/// Ordinary least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rss: f64,
    pub r_squared: f64,
    /// `slope = Σ_i w_i y_i`; used for error propagation.
    pub slope_weights: Vec<f64>,
}

pub fn least_squares_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            found: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("abscissae are all equal"));
    }
    let slope_weights: Vec<f64> = x.iter().map(|v| (v - mx) / sxx).collect();
    let slope: f64 = slope_weights.iter().zip(y).map(|(w, v)| w * v).sum();
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rss,
        r_squared: r_squared(y, rss),
        slope_weights,
    })
}

fn r_squared(y: &[f64], rss: f64) -> f64 {
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if tss == 0.0 {
        if rss == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - rss / tss
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CurveFitMethod {
    /// Straight line through `(t, ⟨f(t)⟩)` for `⟨f⟩ > f_lim·f0`; reports
    /// `γ = −slope/f0`.
    Linear { f_lim: f64 },
    /// `⟨f(t)⟩ = e^{−Γt}(f0 − 1/N) + 1/N` with `Γ` the only parameter, fitted
    /// on `log(⟨f⟩ − 1/N)` for points with `⟨f⟩ > f_co`.
    ExpSaturating { f_co: f64, dim: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFit {
    pub method: CurveFitMethod,
    /// `γ` or `Γ`.
    pub rate: f64,
    /// Residual sum of squares in the fitted (possibly log) coordinates.
    pub rss: f64,
    pub points: usize,
}

pub fn fit_gamma_curve(curve: &FidelityCurve, method: CurveFitMethod) -> Result<CurveFit> {
    let f0 = curve.f0;
    match method {
        CurveFitMethod::Linear { f_lim } => {
            let (t, y): (Vec<f64>, Vec<f64>) = curve
                .mean_f
                .iter()
                .enumerate()
                .filter(|(_, &f)| f > f_lim * f0)
                .map(|(t, &f)| (t as f64, f))
                .unzip();
            let line = least_squares_line(&t, &y)?;
            Ok(CurveFit {
                method,
                rate: -line.slope / f0,
                rss: line.rss,
                points: t.len(),
            })
        }
        CurveFitMethod::ExpSaturating { f_co, dim } => {
            let floor = 1.0 / dim;
            if f0 <= floor {
                return Err(Error::invalid(format!("f0 = {f0} does not exceed 1/N = {floor}")));
            }
            let origin = (f0 - floor).ln();
            let mut t = Vec::new();
            let mut y = Vec::new();
            for (i, &f) in curve.mean_f.iter().enumerate().filter(|(_, &f)| f > f_co) {
                if f <= floor {
                    return Err(Error::invalid(format!(
                        "⟨f({i})⟩ = {f} is not above 1/N; raise f_co"
                    )));
                }
                t.push(i as f64);
                y.push((f - floor).ln() - origin);
            }
            if t.len() < 2 {
                return Err(Error::InsufficientPoints {
                    needed: 2,
                    found: t.len(),
                });
            }
            // line through the fixed intercept: y = −Γ t
            let stt: f64 = t.iter().map(|v| v * v).sum();
            let rate = -t.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / stt;
            let rss = t.iter().zip(&y).map(|(a, b)| (b + rate * a).powi(2)).sum();
            Ok(CurveFit {
                method,
                rate,
                rss,
                points: t.len(),
            })
        }
    }
}

/// Fit of `γ(χ)` over a strength grid.
///
/// `c` and `d` come from `γ = cχ² + dχ⁴`; the quartic term absorbs the
/// leading correction of the multi-qubit product so that `c` estimates the
/// second-order coefficient. `pure_c` is the one-parameter fit `γ = cχ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticLawFit {
    pub c: f64,
    pub d: f64,
    pub r_squared: f64,
    pub rss: f64,
    pub pure_c: f64,
    pub pure_r_squared: f64,
}

pub fn fit_quadratic_law(chi: &[f64], gamma: &[f64]) -> Result<QuadraticLawFit> {
    if chi.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            expected: chi.len(),
            found: gamma.len(),
        });
    }
    let nonzero = chi.iter().filter(|c| **c != 0.0).count();
    if nonzero < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            found: nonzero,
        });
    }
    let x2: Vec<f64> = chi.iter().map(|c| c * c).collect();
    let x4: Vec<f64> = x2.iter().map(|v| v * v).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();

    let pure_c = dot(&x2, gamma) / dot(&x2, &x2);
    let pure_rss: f64 = x2.iter().zip(gamma).map(|(x, g)| (g - pure_c * x).powi(2)).sum();

    // normal equations for (c, d)
    let (a, b, e) = (dot(&x2, &x2), dot(&x2, &x4), dot(&x4, &x4));
    let (r1, r2) = (dot(&x2, gamma), dot(&x4, gamma));
    let det = a * e - b * b;
    if det.abs() <= f64::EPSILON * a * e {
        return Err(Error::invalid("strength grid cannot separate χ² and χ⁴"));
    }
    let c = (r1 * e - r2 * b) / det;
    let d = (a * r2 - b * r1) / det;
    let rss: f64 = x2
        .iter()
        .zip(&x4)
        .zip(gamma)
        .map(|((p, q), g)| (g - c * p - d * q).powi(2))
        .sum();
    Ok(QuadraticLawFit {
        c,
        d,
        r_squared: r_squared(gamma, rss),
        rss,
        pure_c,
        pure_r_squared: r_squared(gamma, pure_rss),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(mean_f: Vec<f64>, f0: f64) -> FidelityCurve {
        let n = mean_f.len();
        FidelityCurve {
            mean_f,
            stderr: vec![0.0; n],
            n_realizations: 1,
            f0,
        }
    }

    #[test]
    fn line_recovery() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let l = least_squares_line(&x, &y).unwrap();
        assert!((l.slope - 2.0).abs() < 1e-15 && (l.intercept - 1.0).abs() < 1e-15);
        assert!(l.rss < 1e-28 && (l.r_squared - 1.0).abs() < 1e-15);
        assert!(least_squares_line(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn exp_saturating_exact_recovery() {
        let (gamma, dim) = (0.1, 256.0);
        let f: Vec<f64> = (0..40)
            .map(|t| (-gamma * t as f64).exp() * (1.0 - 1.0 / dim) + 1.0 / dim)
            .collect();
        let fit = fit_gamma_curve(&curve(f, 1.0), CurveFitMethod::ExpSaturating { f_co: 0.1, dim }).unwrap();
        assert!((fit.rate - gamma).abs() < 1e-10);
    }

    #[test]
    fn flat_curve_gives_zero_rates() {
        let c = curve(vec![0.5; 10], 0.5);
        let lin = fit_gamma_curve(&c, CurveFitMethod::Linear { f_lim: 0.9 }).unwrap();
        assert!(lin.rate.abs() < 1e-15);
        let exp = fit_gamma_curve(&c, CurveFitMethod::ExpSaturating { f_co: 0.1, dim: 4.0 }).unwrap();
        assert!(exp.rate.abs() < 1e-15);
    }

    #[test]
    fn exp_saturating_rejects_points_below_floor() {
        let c = curve(vec![1.0, 0.5, 0.2, 0.1], 1.0);
        assert!(fit_gamma_curve(&c, CurveFitMethod::ExpSaturating { f_co: 0.05, dim: 8.0 }).is_err());
    }

    #[test]
    fn quadratic_law_with_quartic_correction() {
        let chi: [f64; 5] = [0.02, 0.04, 0.06, 0.08, 0.1];
        let gamma: Vec<f64> = chi.iter().map(|c| 16.0 * c * c - 112.0 * c.powi(4)).collect();
        let fit = fit_quadratic_law(&chi, &gamma).unwrap();
        assert!((fit.c - 16.0).abs() < 1e-9 && (fit.d + 112.0).abs() < 1e-6);
        assert!(fit.pure_c < 16.0);
        assert!(fit_quadratic_law(&[0.0, 0.1], &[0.0, 0.1]).is_err());
    }
}
