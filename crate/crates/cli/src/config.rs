//! Run configuration: a JSON file naming the solution source, parameters,
//! grid, times and outputs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use ptds::catalog::{dt_solution, CatalogSolution, FamilyId, Params};
use ptds::dt1::{ds1_highorder, EigenSpec};
use ptds::dt2::ds2_highorder;
use ptds::linalg::CMat;
use ptds::solution::ConstantSeed;
use ptds::{GlobalParams64, Normalization, Solution, SpectralParams, C};

use crate::fail::config_error;

/// Parses a real number or a rational multiple of pi: `"pi"`, `"-pi/6"`,
/// `"2pi"`, `"3*pi/2"`, `"0.25"`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || format!("not a number or multiple of pi: `{s}`");
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v).ok_or_else(bad);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = match num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let v = coef * PI / den;
    v.is_finite().then_some(v).ok_or_else(bad)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumRepr {
    Number(f64),
    Text(String),
}

/// A real config value, written as a JSON number or a pi expression.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(try_from = "NumRepr")]
pub struct Num(pub f64);

impl TryFrom<NumRepr> for Num {
    type Error = String;
    fn try_from(r: NumRepr) -> Result<Self, String> {
        match r {
            NumRepr::Number(v) => Ok(Num(v)),
            NumRepr::Text(s) => parse_real(&s).map(Num),
        }
    }
}

fn zero() -> Num {
    Num(0.0)
}

fn one() -> Num {
    Num(1.0)
}

fn yes() -> bool {
    true
}

fn first_order() -> usize {
    1
}

fn clip() -> f64 {
    10.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `ds1` or `ds2`; checked against the family when both are given.
    pub equation: Option<String>,
    /// Catalog family id.
    pub family: Option<String>,
    /// `closed_form` (default) or `darboux` for catalog families.
    pub evaluator: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, Num>,
    /// Darboux pipeline with explicit spectral data.
    pub dt: Option<DtConfig>,
    /// The constant background itself.
    pub seed: Option<SeedConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub times: Vec<Num>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: Option<[Num; 2]>,
    pub y: Option<[Num; 2]>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub h: Option<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default)]
    pub png: bool,
    /// Ceiling of the |u| colour scale.
    #[serde(default = "clip")]
    pub clip: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: true, png: false, clip: clip() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    pub equation: String,
    #[serde(default = "one")]
    pub epsilon: Num,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DtConfig {
    pub equation: String,
    #[serde(default = "one")]
    pub epsilon: Num,
    pub eigen: Vec<EigenConfig>,
    /// DS-II integration constants, rows of `[re, im]` pairs.
    pub constants: Option<Vec<Vec<[Num; 2]>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenConfig {
    pub r: Num,
    pub phi: Num,
    #[serde(default = "zero")]
    pub e: Num,
    #[serde(default = "zero")]
    pub f: Num,
    /// Superpose the two branches with `F = e + i f` (otherwise the plain branch).
    #[serde(default = "yes")]
    pub superposed: bool,
    /// Number of Taylor coefficients in the spectral angle; 1 is the plain fold.
    #[serde(default = "first_order")]
    pub order: usize,
    /// `half_angle` (default) or `constant`.
    pub normalization: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(|e| config_error(format!("{e:#}")))?;
        serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }
}

/// A solution ready for sampling, with the equation it solves.
pub struct Source {
    pub solution: Box<dyn Solution<f64>>,
    pub global: GlobalParams64,
    pub label: String,
    /// Set for catalog sources.
    pub params: Option<Params<f64>>,
}

fn lib<T>(r: ptds::Result<T>) -> Result<T> {
    r.map_err(|e| config_error(e.to_string()))
}

fn global(equation: &str, epsilon: f64) -> Result<GlobalParams64> {
    match equation {
        "ds1" => lib(GlobalParams64::ds1(epsilon)),
        "ds2" => lib(GlobalParams64::ds2(epsilon)),
        other => Err(config_error(format!("equation must be ds1 or ds2, got `{other}`"))),
    }
}

fn equation_of(gp: &GlobalParams64) -> &'static str {
    if gp.is_ds2() {
        "ds2"
    } else {
        "ds1"
    }
}

impl RunConfig {
    pub fn catalog_params(&self) -> Result<Params<f64>> {
        let name = self.family.as_deref().ok_or_else(|| config_error("config names no catalog family"))?;
        let id: FamilyId = lib(name.parse())?;
        let mut p = Params::defaults(id);
        for (k, v) in &self.params {
            p = lib(p.with(k, v.0))?;
        }
        Ok(p)
    }

    pub fn source(&self) -> Result<Source> {
        let given = [self.family.is_some(), self.dt.is_some(), self.seed.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(config_error("config needs exactly one of `family`, `dt`, `seed`"));
        }
        if self.family.is_none() && (!self.params.is_empty() || self.evaluator.is_some()) {
            return Err(config_error("`params` and `evaluator` apply to catalog families only"));
        }
        let src = if self.family.is_some() {
            let p = self.catalog_params()?;
            let gp = lib(p.global())?;
            let solution: Box<dyn Solution<f64>> = match self.evaluator.as_deref().unwrap_or("closed_form") {
                "closed_form" => Box::new(lib(CatalogSolution::new(p.clone()))?),
                "darboux" => lib(dt_solution(&p))?,
                other => return Err(config_error(format!("evaluator must be closed_form or darboux, got `{other}`"))),
            };
            Source { solution, global: gp, label: p.family().as_str().to_string(), params: Some(p) }
        } else if let Some(s) = &self.seed {
            let gp = global(&s.equation, s.epsilon.0)?;
            Source { solution: Box::new(ConstantSeed::new(gp)), global: gp, label: "seed".into(), params: None }
        } else {
            let dt = self.dt.as_ref().expect("checked above");
            let gp = global(&dt.equation, dt.epsilon.0)?;
            Source { solution: darboux(dt, &gp)?, global: gp, label: format!("{} darboux", dt.equation), params: None }
        };
        if let Some(eq) = &self.equation {
            if eq != equation_of(&src.global) {
                return Err(config_error(format!("equation `{eq}` does not match source {}", src.label)));
            }
        }
        Ok(src)
    }
}

fn darboux(dt: &DtConfig, gp: &GlobalParams64) -> Result<Box<dyn Solution<f64>>> {
    if dt.eigen.is_empty() {
        return Err(config_error("dt.eigen is empty"));
    }
    let mut specs = Vec::new();
    let mut orders = Vec::new();
    for e in &dt.eigen {
        if e.order == 0 {
            return Err(config_error("eigenfunction order must be at least 1"));
        }
        let norm = match e.normalization.as_deref().unwrap_or("half_angle") {
            "half_angle" => Normalization::HalfAngle(C::new(1.0, 0.0)),
            "constant" => Normalization::Constant(C::new(1.0, 0.0)),
            other => return Err(config_error(format!("normalization must be half_angle or constant, got `{other}`"))),
        };
        let sp = SpectralParams::new(e.r.0, e.phi.0).with_f(e.e.0, e.f.0).with_norm(norm);
        specs.push(if e.superposed { EigenSpec::superposed(sp) } else { EigenSpec::plain(sp) });
        orders.push(e.order);
    }
    if gp.is_ds2() {
        let consts = match &dt.constants {
            None => None,
            Some(rows) => {
                let n: usize = orders.iter().sum();
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(config_error(format!("dt.constants must be {n} x {n}")));
                }
                Some(CMat::from_fn(n, n, |i, j| C::new(rows[i][j][0].0, rows[i][j][1].0)))
            }
        };
        Ok(Box::new(lib(ds2_highorder(&specs, &orders, consts.as_ref(), gp))?))
    } else {
        if dt.constants.is_some() {
            return Err(config_error("dt.constants applies to ds2 only"));
        }
        let derivs: Vec<usize> = orders.iter().map(|o| o - 1).collect();
        Ok(Box::new(lib(ds1_highorder(&specs, &derivs, gp))?))
    }
}

/// Grid and time overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub times: Vec<f64>,
    pub grid: Option<(usize, usize)>,
    pub bbox: Option<[f64; 4]>,
    pub h: Option<f64>,
}

/// Spacing used when neither the command line nor the config gives one.
pub const DEFAULT_H: f64 = 0.02;
pub const DEFAULT_HALF_WIDTH: f64 = 3.0;

impl RunConfig {
    pub fn times(&self, o: &Overrides) -> Vec<f64> {
        if !o.times.is_empty() {
            o.times.clone()
        } else if !self.times.is_empty() {
            self.times.iter().map(|t| t.0).collect()
        } else {
            vec![0.0]
        }
    }

    pub fn bbox(&self, o: &Overrides) -> Result<[f64; 4]> {
        let d = DEFAULT_HALF_WIDTH;
        let b = o.bbox.unwrap_or_else(|| {
            let x = self.grid.x.map_or((-d, d), |[a, b]| (a.0, b.0));
            let y = self.grid.y.map_or((-d, d), |[a, b]| (a.0, b.0));
            [x.0, x.1, y.0, y.1]
        });
        if !(b[1] > b[0] && b[3] > b[2]) {
            return Err(config_error(format!("empty box {b:?}")));
        }
        Ok(b)
    }

    pub fn spacing(&self, o: &Overrides) -> Result<f64> {
        let h = o.h.or(self.grid.h.map(|h| h.0)).unwrap_or(DEFAULT_H);
        if !(h > 0.0) {
            return Err(config_error(format!("spacing must be positive, got {h}")));
        }
        Ok(h)
    }

    /// Node counts for sampling: explicit counts win over a spacing.
    pub fn counts(&self, o: &Overrides) -> Result<(usize, usize)> {
        let b = self.bbox(o)?;
        let from_h = |h: f64| {
            let n = |w: f64| (w / h).round() as usize + 1;
            (n(b[1] - b[0]), n(b[3] - b[2]))
        };
        let (nx, ny) = match (o.grid, o.h, self.grid.nx, self.grid.ny) {
            (Some(g), _, _, _) => g,
            (None, Some(h), _, _) => from_h(h),
            (None, None, Some(nx), Some(ny)) => (nx, ny),
            (None, None, None, None) => from_h(self.spacing(o)?),
            _ => return Err(config_error("grid.nx and grid.ny go together")),
        };
        if nx == 0 || ny == 0 {
            return Err(config_error("grid needs at least one node per axis"));
        }
        Ok((nx, ny))
    }
}

/// `n` evenly spaced nodes over `[a, b]`; a single node sits at the midpoint.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + step * i as f64 }).collect()
}

/// Parses `A,B` or `A,B,C,D` style lists for the command line.
pub fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let vals = s.split(',').map(parse_real).collect::<Result<Vec<_>, _>>()?;
    vals.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated values, got {}", v.len()))
}

pub fn parse_counts(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected NX,NY, got `{s}`"))?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((n(a)?, n(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_real("pi"), Ok(PI));
        assert_eq!(parse_real("-pi/6"), Ok(-PI / 6.0));
        assert_eq!(parse_real("2pi"), Ok(2.0 * PI));
        assert_eq!(parse_real(" 3 * pi / 2 "), Ok(1.5 * PI));
        assert_eq!(parse_real("-0.25"), Ok(-0.25));
        assert!(parse_real("tau").is_err());
        assert!(parse_real("pi/0").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn lists_and_counts() {
        assert_eq!(parse_list::<4>("-1,1,-pi,pi"), Ok([-1.0, 1.0, -PI, PI]));
        assert!(parse_list::<4>("1,2").is_err());
        assert_eq!(parse_counts("3, 4"), Ok((3, 4)));
    }

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(-3.0, 3.0, 301);
        assert_eq!((v[0], v[300]), (-3.0, 3.0));
        assert_eq!(linspace(0.0, 2.0, 1), vec![1.0]);
    }
}
