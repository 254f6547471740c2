//! Test-only oracles, independent of the library's computation paths.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use verdoorn::dataset::PanelObservation;

/// OLS through accumulated raw moments (Σx, Σx², Σxy, ...), the textbook single-pass form.
#[derive(Debug, Clone)]
pub struct RawMomentFit {
    pub intercept: f64,
    pub slope: f64,
    pub se_intercept: f64,
    pub se_slope: f64,
    pub t_intercept: f64,
    pub t_slope: f64,
    pub r_squared: f64,
    pub durbin_watson: f64,
    pub residuals: Vec<f64>,
    pub df: usize,
}

pub fn raw_moment_fit(x: &[f64], y: &[f64]) -> RawMomentFit {
    let n = x.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
        syy += b * b;
    }
    let cxx = sxx - sx * sx / n;
    let cxy = sxy - sx * sy / n;
    let cyy = syy - sy * sy / n;
    let slope = cxy / cxx;
    let intercept = (sy - slope * sx) / n;
    let ssr = cyy - slope * cxy;
    let df = x.len() - 2;
    let s2 = ssr / df as f64;
    let se_slope = (s2 / cxx).sqrt();
    let se_intercept = (s2 * sxx / (n * cxx)).sqrt();
    let residuals: Vec<f64> = x.iter().zip(y).map(|(&a, &b)| b - (intercept + slope * a)).collect();
    let dw_num: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    let dw_den: f64 = residuals.iter().map(|u| u * u).sum();
    RawMomentFit {
        intercept,
        slope,
        se_intercept,
        se_slope,
        t_intercept: intercept / se_intercept,
        t_slope: slope / se_slope,
        r_squared: slope * cxy / cyy,
        durbin_watson: dw_num / dw_den,
        residuals,
        df,
    }
}

/// Γ((ν+1)/2) / Γ(ν/2) for integer ν ≥ 1 by the recursion R(ν+2) = R(ν)(ν+1)/ν.
fn gamma_ratio(df: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let (mut r, mut nu) = if df % 2 == 1 {
        (1.0 / pi.sqrt(), 1)
    } else {
        (pi.sqrt() / 2.0, 2)
    };
    while nu < df {
        r *= (nu as f64 + 1.0) / nu as f64;
        nu += 2;
    }
    r
}

/// Two-sided t tail by composite Simpson quadrature of the density on [0, |t|].
pub fn t_tail_by_quadrature(t: f64, df: usize) -> f64 {
    let nu = df as f64;
    let c = gamma_ratio(df) / (nu * std::f64::consts::PI).sqrt();
    let density = |s: f64| c * (1.0 + s * s / nu).powf(-(nu + 1.0) / 2.0);
    let t = t.abs();
    let intervals = 20_000;
    let h = t / intervals as f64;
    let mut acc = density(0.0) + density(t);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * density(i as f64 * h);
    }
    1.0 - 2.0 * acc * h / 3.0
}

/// A random balanced level panel with positive levels.
pub fn random_panel(rng: &mut ChaCha8Rng, regions: usize, sectors: usize, years: usize) -> Vec<PanelObservation> {
    let mut panel = Vec::new();
    for s in 0..sectors {
        for r in 0..regions {
            let mut output: f64 = rng.random_range(1.0..1e6);
            let mut employment: f64 = rng.random_range(1.0..1e5);
            for y in 0..years {
                panel.push(PanelObservation {
                    region: format!("N{r:02}"),
                    sector: format!("sector{s}"),
                    year: 1990 + y as i32,
                    output,
                    employment,
                });
                output *= rng.random_range(0.85..1.2);
                employment *= rng.random_range(0.9..1.1);
            }
        }
    }
    panel
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// |a − b| ≤ tol · max(|a|, |b|, floor)
pub fn close(a: f64, b: f64, tol: f64, floor: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(floor)
}

fn gauss(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

/// A noisy linear sample whose x and y scales are drawn log-uniformly from 1e-3 to 1e3.
/// Returns (x, y, x scale, y scale).
pub fn scaled_sample(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let mut r = rng(seed);
    let sx = 10f64.powf(r.random_range(-3.0..3.0));
    let sy = 10f64.powf(r.random_range(-3.0..3.0));
    let offset = r.random_range(-2.0..2.0);
    let a = r.random_range(-1.0..1.0);
    let b = r.random_range(-2.0..2.0);
    let noise = r.random_range(0.05..2.0);
    let x: Vec<f64> = (0..n).map(|_| sx * (offset + gauss(&mut r))).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|xi| sy * (a + b * xi / sx + noise * gauss(&mut r)))
        .collect();
    (x, y, sx, sy)
}
