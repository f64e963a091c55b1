//! Named scalar fields for right-hand sides and boundary data.
//!
//! A small closed table of expressions (polynomials, powers and logs of |x|,
//! trigonometric fields, seeded random fields) covers every experiment
//! without an expression parser. Randomized fields freeze their
//! coefficients at construction, so evaluation is deterministic.

use crate::error::{Error, Result};
use crate::sampling::gaussian;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub enum Expr {
    Zero,
    Constant(f64),
    /// `c0 + sum_i c_i x_i`.
    Affine { c0: f64, coeffs: Vec<f64> },
    /// `log|x - center|`.
    LogR { center: Vec<f64> },
    /// `|x - center|^gamma`.
    PowerR { gamma: f64, center: Vec<f64> },
    /// `x_1^2 - x_2^2`.
    HarmonicQuad,
    /// `amplitude * sin(freq * x_axis + phase)`.
    Sin { axis: usize, freq: f64, amplitude: f64, phase: f64 },
    /// Random polynomial of total degree <= degree, coefficients frozen
    /// from the seed, scaled by amplitude.
    RandomPoly { degree: usize, seed: u64, amplitude: f64, terms: Vec<(Vec<u32>, f64)> },
    /// Offset plus a random low-frequency trigonometric field; with
    /// offset >= amplitude the field is non-negative.
    RandomTrig { seed: u64, amplitude: f64, offset: f64, modes: Vec<(Vec<f64>, f64, f64)> },
    /// Pointwise scale of another expression.
    Scaled(f64, Arc<Expr>),
    /// Library-internal closures (not constructible from config).
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(n) => write!(f, "Expr({n})"),
            None => write!(f, "Expr(custom)"),
        }
    }
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Zero => 0.0,
            Expr::Constant(c) => *c,
            Expr::Affine { c0, coeffs } => {
                c0 + coeffs.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>()
            }
            Expr::LogR { center } => radius(x, center).ln(),
            Expr::PowerR { gamma, center } => radius(x, center).powf(*gamma),
            Expr::HarmonicQuad => x[0] * x[0] - x[1] * x[1],
            Expr::Sin { axis, freq, amplitude, phase } => {
                amplitude * (freq * x[*axis] + phase).sin()
            }
            Expr::RandomPoly { terms, amplitude, .. } => {
                amplitude
                    * terms
                        .iter()
                        .map(|(exps, c)| {
                            c * exps
                                .iter()
                                .zip(x)
                                .map(|(&e, &xi)| xi.powi(e as i32))
                                .product::<f64>()
                        })
                        .sum::<f64>()
            }
            Expr::RandomTrig { amplitude, offset, modes, .. } => {
                let s: f64 = modes
                    .iter()
                    .map(|(k, phase, c)| {
                        c * (k.iter().zip(x).map(|(ki, xi)| ki * xi).sum::<f64>() + phase)
                            .sin()
                    })
                    .sum();
                offset + amplitude * s / modes.len() as f64
            }
            Expr::Scaled(s, inner) => s * inner.eval(x),
            Expr::Custom(f) => f(x),
        }
    }

    pub fn custom<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Expr {
        Expr::Custom(Arc::new(f))
    }

    pub fn scaled(&self, s: f64) -> Expr {
        Expr::Scaled(s, Arc::new(self.clone()))
    }

    pub fn random_poly(dim: usize, degree: usize, seed: u64, amplitude: f64) -> Expr {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut terms = Vec::new();
        for exps in monomials(dim, degree) {
            terms.push((exps, rng.gen_range(-1.0..1.0)));
        }
        Expr::RandomPoly { degree, seed, amplitude, terms }
    }

    pub fn random_trig(dim: usize, seed: u64, amplitude: f64, offset: f64) -> Expr {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xd134_2543_de82_ef95));
        let n_modes = 6;
        let mut modes = Vec::with_capacity(n_modes);
        for _ in 0..n_modes {
            let k: Vec<f64> = (0..dim).map(|_| 2.0 * gaussian(&mut rng)).collect();
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let c = rng.gen_range(-1.0..1.0);
            modes.push((k, phase, c));
        }
        Expr::RandomTrig { seed, amplitude, offset, modes }
    }

    /// Canonical config-file spelling, when one exists.
    pub fn name(&self) -> Option<String> {
        Some(match self {
            Expr::Zero => "zero".into(),
            Expr::Constant(c) => format!("const:{c}"),
            Expr::Affine { c0, coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                format!("affine:{c0},{}", cs.join(","))
            }
            Expr::LogR { center } => format!("logr:{}", join(center)),
            Expr::PowerR { gamma, center } => format!("powr:{gamma},{}", join(center)),
            Expr::HarmonicQuad => "harmonic_quad".into(),
            Expr::Sin { axis, freq, amplitude, phase } => {
                format!("sin:{axis},{freq},{amplitude},{phase}")
            }
            Expr::RandomPoly { degree, seed, amplitude, .. } => {
                format!("randpoly:{degree},{seed},{amplitude}")
            }
            Expr::RandomTrig { seed, amplitude, offset, .. } => {
                format!("randtrig:{seed},{amplitude},{offset}")
            }
            Expr::Scaled(s, inner) => format!("scale:{s};{}", inner.name()?),
            Expr::Custom(_) => return None,
        })
    }

    /// Parses the config spelling; `dim` fixes center/coefficient lengths
    /// when they are omitted.
    pub fn parse(spec: &str, dim: usize) -> Result<Expr> {
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix("scale:") {
            let (s, inner) = rest
                .split_once(';')
                .ok_or_else(|| Error::Config("scale needs 'scale:factor;expr'".into()))?;
            return Ok(Expr::parse(inner, dim)?.scaled(parse_f64(s)?));
        }
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n, a),
            None => (spec, ""),
        };
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(parse_f64)
                .collect::<Result<Vec<f64>>>()?
        };
        let center_from = |nums: &[f64]| -> Vec<f64> {
            if nums.is_empty() {
                vec![0.0; dim]
            } else {
                nums.to_vec()
            }
        };
        match name {
            "zero" => Ok(Expr::Zero),
            "const" => Ok(Expr::Constant(arg(&nums, 0)?)),
            "affine" => {
                if nums.len() != dim + 1 {
                    return Err(Error::Config(format!(
                        "affine needs {} coefficients",
                        dim + 1
                    )));
                }
                Ok(Expr::Affine { c0: nums[0], coeffs: nums[1..].to_vec() })
            }
            "logr" => Ok(Expr::LogR { center: center_from(&nums) }),
            "powr" => Ok(Expr::PowerR {
                gamma: arg(&nums, 0)?,
                center: center_from(&nums[1.min(nums.len())..]),
            }),
            "harmonic_quad" => Ok(Expr::HarmonicQuad),
            "sin" => Ok(Expr::Sin {
                axis: arg(&nums, 0)? as usize,
                freq: arg(&nums, 1)?,
                amplitude: arg(&nums, 2)?,
                phase: nums.get(3).copied().unwrap_or(0.0),
            }),
            "randpoly" => Ok(Expr::random_poly(
                dim,
                arg(&nums, 0)? as usize,
                arg(&nums, 1)? as u64,
                arg(&nums, 2)?,
            )),
            "randtrig" => Ok(Expr::random_trig(
                dim,
                arg(&nums, 0)? as u64,
                arg(&nums, 1)?,
                arg(&nums, 2)?,
            )),
            other => Err(Error::Config(format!("unknown expression '{other}'"))),
        }
    }
}

fn radius(x: &[f64], center: &[f64]) -> f64 {
    x.iter()
        .zip(center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Accepts plain floats and simple fractions like `1/3`.
fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad number '{s}'")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad number '{s}'")))?;
        return Ok(n / d);
    }
    s.parse()
        .map_err(|_| Error::Config(format!("bad number '{s}'")))
}

fn arg(nums: &[f64], i: usize) -> Result<f64> {
    nums.get(i)
        .copied()
        .ok_or_else(|| Error::Config("missing expression argument".into()))
}

fn monomials(dim: usize, degree: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    fn rec(axis: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if axis == current.len() {
            out.push(current.clone());
            return;
        }
        for e in 0..=left {
            current[axis] = e;
            rec(axis + 1, left - e, current, out);
        }
        current[axis] = 0;
    }
    rec(0, degree as u32, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_eval() {
        let e = Expr::parse("powr:1/3", 3).unwrap();
        assert!((e.eval(&[0.125, 0.0, 0.0]) - 0.5).abs() < 1e-14);
        let e = Expr::parse("logr", 2).unwrap();
        assert_eq!(e.eval(&[1.0, 0.0]), 0.0);
        let e = Expr::parse("harmonic_quad", 2).unwrap();
        assert_eq!(e.eval(&[2.0, 1.0]), 3.0);
        let e = Expr::parse("scale:2;const:3", 2).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]), 6.0);
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(Expr::parse("mystery:1", 2).is_err());
    }

    #[test]
    fn name_round_trip() {
        for spec in ["zero", "const:2.5", "logr:0,0", "powr:0.5,0,0", "randpoly:2,7,1.5"] {
            let e = Expr::parse(spec, 2).unwrap();
            let e2 = Expr::parse(&e.name().unwrap(), 2).unwrap();
            for x in [[0.3, -0.4], [1.0, 2.0]] {
                assert_eq!(e.eval(&x), e2.eval(&x));
            }
        }
    }

    #[test]
    fn random_fields_deterministic() {
        let a = Expr::random_poly(3, 3, 42, 1.0);
        let b = Expr::random_poly(3, 3, 42, 1.0);
        let c = Expr::random_poly(3, 3, 43, 1.0);
        let x = [0.2, -0.7, 0.4];
        assert_eq!(a.eval(&x), b.eval(&x));
        assert_ne!(a.eval(&x), c.eval(&x));
    }

    #[test]
    fn random_trig_respects_offset() {
        let e = Expr::random_trig(3, 5, 1.0, 1.5);
        for i in 0..100 {
            let t = i as f64 / 99.0;
            assert!(e.eval(&[t, 1.0 - t, 0.5 * t]) > 0.0);
        }
    }
}
