//! Flat INI-style configuration: `[section]` headers and `key = value`
//! lines, `#` (inline) or `;` (whole-line) comments. Unknown sections and
//! keys are rejected so a typo never silently falls back to a default.

use crate::domain::{DomainSpec, Shape};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::operator::{OperatorSpec, Sign};
use crate::scheme::{Backend, Problem, SweepMode};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Config {
    pub operator: OperatorSpec,
    pub domain: DomainSpec,
    pub h: f64,
    pub stencil_order: usize,
    pub backend: Backend,
    pub sweep: SweepMode,
    pub tolerance: Option<f64>,
    pub max_iterations: usize,
    pub damping: Option<f64>,
    pub rhs: Expr,
    pub boundary: Expr,
    pub suites: Vec<String>,
    pub batch: usize,
    pub seed: Option<u64>,
    pub abp_cap: f64,
    pub harnack_cap: f64,
    /// Radii probed by the three-circles suite.
    pub radii: Vec<f64>,
    pub out_dir: String,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let raw = parse_ini(text)?;
        let mut cfg = RawConfig::new(raw);

        let domain = cfg.domain()?;
        let dim = domain.dim();
        let operator = cfg.operator()?;

        let h = cfg.f64("grid", "h")?.ok_or_else(|| Error::Config("grid.h is required".into()))?;
        let stencil_order = cfg.usize("grid", "stencil_order")?.unwrap_or(1);

        let backend = match cfg.str("solver", "backend")?.as_deref() {
            None | Some("monotone") => Backend::Monotone,
            Some("spectral") => Backend::Spectral,
            Some(other) => return Err(Error::Config(format!("unknown backend '{other}'"))),
        };
        let sweep = match cfg.str("solver", "sweep")?.as_deref() {
            None | Some("jacobi") => SweepMode::Jacobi,
            Some("gauss_seidel") => SweepMode::GaussSeidel,
            Some(other) => return Err(Error::Config(format!("unknown sweep '{other}'"))),
        };
        let tolerance = cfg.f64("solver", "tolerance")?;
        let max_iterations = cfg.usize("solver", "max_iterations")?.unwrap_or(1_000_000);
        let damping = cfg.f64("solver", "damping")?;

        let rhs = match cfg.str("rhs", "expr")? {
            Some(s) => Expr::parse(&s, dim)?,
            None => Expr::Zero,
        };
        let boundary = match cfg.str("boundary", "expr")? {
            Some(s) => Expr::parse(&s, dim)?,
            None => Expr::Zero,
        };

        let suites = cfg
            .str("experiment", "suites")?
            .map(|s| s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect())
            .unwrap_or_default();
        let batch = cfg.usize("experiment", "batch")?.unwrap_or(10);
        let seed = cfg.u64("experiment", "seed")?;
        let abp_cap = cfg.f64("experiment", "abp_cap")?.unwrap_or(crate::verify::DEFAULT_ABP_CAP);
        let harnack_cap = cfg
            .f64("experiment", "harnack_cap")?
            .unwrap_or(crate::verify::DEFAULT_HARNACK_CAP);
        let radii = cfg
            .str("experiment", "radii")?
            .map(|s| -> Result<Vec<f64>> { s.split(',').map(|p| parse_num(p.trim())).collect() })
            .transpose()?
            .unwrap_or_default();

        let out_dir = cfg.str("output", "dir")?.unwrap_or_else(|| "out".into());

        cfg.finish()?;
        Ok(Config {
            operator,
            domain,
            h,
            stencil_order,
            backend,
            sweep,
            tolerance,
            max_iterations,
            damping,
            rhs,
            boundary,
            suites,
            batch,
            seed,
            abp_cap,
            harnack_cap,
            radii,
            out_dir,
        })
    }

    pub fn to_problem(&self) -> Result<Problem> {
        let mut p = Problem::new(self.domain.clone(), self.operator.clone(), self.h);
        p.f = self.rhs.clone();
        p.g = self.boundary.clone();
        p.backend = self.backend;
        p.sweep = self.sweep;
        p.stencil_order = self.stencil_order;
        if let Some(t) = self.tolerance {
            p.tolerance = t;
        }
        p.max_iterations = self.max_iterations;
        p.damping_override = self.damping;
        Ok(p)
    }

    /// Effective configuration dump; `parse(dump())` reproduces the config.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        s.push_str("[operator]\n");
        match &self.operator {
            OperatorSpec::Weighted(w) => {
                s.push_str("kind = weighted\n");
                s.push_str(&format!("weights = {}\n", join_nums(w.coeffs())));
            }
            OperatorSpec::PucciPlus { lambda, big_lambda } => {
                s.push_str("kind = pucci_plus\n");
                s.push_str(&format!("lambda = {lambda}\nbig_lambda = {big_lambda}\n"));
            }
            OperatorSpec::PucciMinus { lambda, big_lambda } => {
                s.push_str("kind = pucci_minus\n");
                s.push_str(&format!("lambda = {lambda}\nbig_lambda = {big_lambda}\n"));
            }
            OperatorSpec::PartialTrace { k, sign } => {
                s.push_str("kind = partial_trace\n");
                s.push_str(&format!("k = {k}\n"));
                s.push_str(&format!(
                    "sign = {}\n",
                    if *sign == Sign::Lower { "lower" } else { "upper" }
                ));
            }
            OperatorSpec::MinMax { a1, an } => {
                s.push_str("kind = minmax\n");
                s.push_str(&format!("a1 = {a1}\nan = {an}\n"));
            }
        }
        s.push_str("\n[domain]\n");
        match self.domain.shape() {
            Shape::Box { bounds } => {
                s.push_str("shape = box\n");
                let parts: Vec<String> =
                    bounds.iter().map(|(lo, hi)| format!("{lo},{hi}")).collect();
                s.push_str(&format!("bounds = {}\n", parts.join(";")));
            }
            Shape::Ball { center, radius } => {
                s.push_str("shape = ball\n");
                s.push_str(&format!("center = {}\n", join_nums(center)));
                s.push_str(&format!("radius = {radius}\n"));
            }
            Shape::Annulus { center, r_inner, r_outer } => {
                s.push_str("shape = annulus\n");
                s.push_str(&format!("center = {}\n", join_nums(center)));
                s.push_str(&format!("r_inner = {r_inner}\nr_outer = {r_outer}\n"));
            }
        }
        s.push_str("\n[grid]\n");
        s.push_str(&format!("h = {}\n", self.h));
        s.push_str(&format!("stencil_order = {}\n", self.stencil_order));
        s.push_str("\n[solver]\n");
        s.push_str(&format!(
            "backend = {}\n",
            if self.backend == Backend::Monotone { "monotone" } else { "spectral" }
        ));
        s.push_str(&format!(
            "sweep = {}\n",
            if self.sweep == SweepMode::Jacobi { "jacobi" } else { "gauss_seidel" }
        ));
        if let Some(t) = self.tolerance {
            s.push_str(&format!("tolerance = {t}\n"));
        }
        s.push_str(&format!("max_iterations = {}\n", self.max_iterations));
        if let Some(d) = self.damping {
            s.push_str(&format!("damping = {d}\n"));
        }
        if let Some(n) = self.rhs.name() {
            s.push_str("\n[rhs]\n");
            s.push_str(&format!("expr = {n}\n"));
        }
        if let Some(n) = self.boundary.name() {
            s.push_str("\n[boundary]\n");
            s.push_str(&format!("expr = {n}\n"));
        }
        s.push_str("\n[experiment]\n");
        if !self.suites.is_empty() {
            s.push_str(&format!("suites = {}\n", self.suites.join(",")));
        }
        s.push_str(&format!("batch = {}\n", self.batch));
        if let Some(seed) = self.seed {
            s.push_str(&format!("seed = {seed}\n"));
        }
        s.push_str(&format!("abp_cap = {}\n", self.abp_cap));
        s.push_str(&format!("harnack_cap = {}\n", self.harnack_cap));
        if !self.radii.is_empty() {
            s.push_str(&format!("radii = {}\n", join_nums(&self.radii)));
        }
        s.push_str("\n[output]\n");
        s.push_str(&format!("dir = {}\n", self.out_dir));
        s
    }
}

fn join_nums(v: &[f64]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Accepts plain floats and fractions like `1/3`.
fn parse_num(s: &str) -> Result<f64> {
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| Error::Config(format!("bad number '{s}'")))?;
        let d: f64 = d.trim().parse().map_err(|_| Error::Config(format!("bad number '{s}'")))?;
        return Ok(n / d);
    }
    s.parse().map_err(|_| Error::Config(format!("bad number '{s}'")))
}

const KNOWN_SECTIONS: &[&str] =
    &["operator", "domain", "grid", "solver", "rhs", "boundary", "experiment", "output"];

fn parse_ini(text: &str) -> Result<BTreeMap<(String, String), String>> {
    let mut map = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        // ';' only starts a whole-line comment: it is a value separator in
        // e.g. box bounds, so inline comments use '#'
        if raw.trim_start().starts_with(';') {
            continue;
        }
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            if !KNOWN_SECTIONS.contains(&section.as_str()) {
                return Err(Error::Config(format!("unknown section [{section}]")));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        if section.is_empty() {
            return Err(Error::Config(format!("line {}: key before any [section]", lineno + 1)));
        }
        let prev = map.insert(
            (section.clone(), key.trim().to_string()),
            value.trim().to_string(),
        );
        if prev.is_some() {
            return Err(Error::Config(format!("duplicate key {section}.{}", key.trim())));
        }
    }
    Ok(map)
}

/// Tracks which keys have been consumed so leftovers can be rejected.
struct RawConfig {
    map: BTreeMap<(String, String), String>,
}

impl RawConfig {
    fn new(map: BTreeMap<(String, String), String>) -> Self {
        Self { map }
    }

    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.map.remove(&(section.to_string(), key.to_string()))
    }

    fn str(&mut self, section: &str, key: &str) -> Result<Option<String>> {
        Ok(self.take(section, key))
    }

    fn f64(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        self.take(section, key).map(|s| parse_num(&s)).transpose()
    }

    fn usize(&mut self, section: &str, key: &str) -> Result<Option<usize>> {
        self.take(section, key)
            .map(|s| s.parse().map_err(|_| Error::Config(format!("bad integer for {section}.{key}"))))
            .transpose()
    }

    fn u64(&mut self, section: &str, key: &str) -> Result<Option<u64>> {
        self.take(section, key)
            .map(|s| s.parse().map_err(|_| Error::Config(format!("bad integer for {section}.{key}"))))
            .transpose()
    }

    fn nums(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(section, key)
            .map(|s| s.split(',').map(|p| parse_num(p.trim())).collect())
            .transpose()
    }

    fn domain(&mut self) -> Result<DomainSpec> {
        let shape = self
            .str("domain", "shape")?
            .ok_or_else(|| Error::Config("domain.shape is required".into()))?;
        match shape.as_str() {
            "box" => {
                let spec = self
                    .str("domain", "bounds")?
                    .ok_or_else(|| Error::Config("box needs domain.bounds".into()))?;
                let mut bounds = Vec::new();
                for part in spec.split(';') {
                    let nums: Vec<f64> = part
                        .split(',')
                        .map(|p| parse_num(p.trim()))
                        .collect::<Result<_>>()?;
                    if nums.len() != 2 {
                        return Err(Error::Config(
                            "bounds axis needs 'lo,hi' pairs separated by ';'".into(),
                        ));
                    }
                    bounds.push((nums[0], nums[1]));
                }
                DomainSpec::boxed(&bounds)
            }
            "ball" => {
                let center = self
                    .nums("domain", "center")?
                    .ok_or_else(|| Error::Config("ball needs domain.center".into()))?;
                let radius = self
                    .f64("domain", "radius")?
                    .ok_or_else(|| Error::Config("ball needs domain.radius".into()))?;
                DomainSpec::ball(&center, radius)
            }
            "annulus" => {
                let center = self
                    .nums("domain", "center")?
                    .ok_or_else(|| Error::Config("annulus needs domain.center".into()))?;
                let r_inner = self
                    .f64("domain", "r_inner")?
                    .ok_or_else(|| Error::Config("annulus needs domain.r_inner".into()))?;
                let r_outer = self
                    .f64("domain", "r_outer")?
                    .ok_or_else(|| Error::Config("annulus needs domain.r_outer".into()))?;
                DomainSpec::annulus(&center, r_inner, r_outer)
            }
            other => Err(Error::Config(format!("unknown shape '{other}'"))),
        }
    }

    fn operator(&mut self) -> Result<OperatorSpec> {
        let kind = self
            .str("operator", "kind")?
            .ok_or_else(|| Error::Config("operator.kind is required".into()))?;
        match kind.as_str() {
            "weighted" => {
                let w = self
                    .nums("operator", "weights")?
                    .ok_or_else(|| Error::Config("weighted needs operator.weights".into()))?;
                OperatorSpec::weighted(&w)
            }
            "pucci_plus" | "pucci_minus" => {
                let l = self
                    .f64("operator", "lambda")?
                    .ok_or_else(|| Error::Config("pucci needs operator.lambda".into()))?;
                let big = self
                    .f64("operator", "big_lambda")?
                    .ok_or_else(|| Error::Config("pucci needs operator.big_lambda".into()))?;
                if kind == "pucci_plus" {
                    OperatorSpec::pucci_plus(l, big)
                } else {
                    OperatorSpec::pucci_minus(l, big)
                }
            }
            "partial_trace" => {
                let k = self
                    .usize("operator", "k")?
                    .ok_or_else(|| Error::Config("partial_trace needs operator.k".into()))?;
                let sign = match self.str("operator", "sign")?.as_deref() {
                    Some("lower") | Some("-") => Sign::Lower,
                    Some("upper") | Some("+") => Sign::Upper,
                    _ => {
                        return Err(Error::Config(
                            "partial_trace needs operator.sign = lower|upper".into(),
                        ))
                    }
                };
                OperatorSpec::partial_trace(k, sign)
            }
            "minmax" => {
                let a1 = self
                    .f64("operator", "a1")?
                    .ok_or_else(|| Error::Config("minmax needs operator.a1".into()))?;
                let an = self
                    .f64("operator", "an")?
                    .ok_or_else(|| Error::Config("minmax needs operator.an".into()))?;
                OperatorSpec::minmax(a1, an)
            }
            other => Err(Error::Config(format!("unknown operator kind '{other}'"))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(((section, key), _)) = self.map.into_iter().next() {
            return Err(Error::Config(format!("unknown key {section}.{key}")));
        }
        Ok(())
    }
}
