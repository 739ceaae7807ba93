//! TOML run configuration. Every section is optional at parse time; each
//! subcommand asks for the sections it uses and gets a [`ConfigError`]
//! naming the offending field when something is missing or invalid.

use std::path::{Path, PathBuf};

use gevrey_beam::analyticity::FitPolicy;
use gevrey_beam::initial::InitialData;
use gevrey_beam::lab::FieldSampler;
use gevrey_beam::solver::{IntegrateOptions, Params, Scheme, State};
use gevrey_beam::Grid;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physics: Option<Params>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyticity: Option<AnalyticitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<LemmaSection>,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub points_per_dim: usize,
    pub box_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub u0: InitialData,
    #[serde(default = "zero_data")]
    pub u1: InitialData,
    /// Radius at which the initial lifted energy is measured. Defaults to
    /// half the known radius of `u0` when it has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
}

fn zero_data() -> InitialData {
    InitialData::Zero
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub integrator: Scheme,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "one")]
    pub output_stride: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_relative_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_warn: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticitySection {
    #[serde(default)]
    pub sigmas: Vec<f64>,
    /// Time window of the drift sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub fit: FitPolicy,
    /// Random-field corpus for the residual-constant fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<CorpusSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub points_per_dim: usize,
    pub band: usize,
    pub sigma: f64,
    pub samples: usize,
    #[serde(default = "unit")]
    pub h2_norm: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSection {
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    #[serde(default)]
    pub base: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

fn err(path: &str, message: impl ToString) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.to_string(),
    }
}

fn missing(section: &str) -> ConfigError {
    err(section, "section is required by this subcommand")
}

fn check(ok: bool, path: &str, message: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(err(path, message))
    }
}

fn positive(v: f64, path: &str) -> Result<(), ConfigError> {
    check(v > 0.0 && v.is_finite(), path, "must be positive and finite")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| err("", e.message()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            err(if path == "." { "" } else { &path }, e.inner().message())
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config types serialize to TOML")
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        let g = self.grid.ok_or_else(|| missing("grid"))?;
        check((1..=3).contains(&g.dim), "grid.dim", "must be 1, 2 or 3")?;
        check(
            g.points_per_dim >= 4 && g.points_per_dim % 2 == 0,
            "grid.points_per_dim",
            "must be even and at least 4",
        )?;
        positive(g.box_length, "grid.box_length")?;
        Grid::new(g.dim, g.points_per_dim, g.box_length).map_err(|e| err("grid", e))
    }

    pub fn params(&self) -> Result<Params, ConfigError> {
        let p = self.physics.ok_or_else(|| missing("physics"))?;
        positive(p.m, "physics.m")?;
        check(p.p % 2 == 1, "physics.p", "must be an odd integer >= 1")?;
        check(p.coupling.is_finite(), "physics.coupling", "must be finite")?;
        p.validate().map_err(|e| err("physics", e))?;
        Ok(p)
    }

    fn data(&self) -> Result<&DataSection, ConfigError> {
        self.data.as_ref().ok_or_else(|| missing("data"))
    }

    pub fn initial_data(&self, grid: &Grid) -> Result<(InitialData, InitialData), ConfigError> {
        let d = self.data()?;
        d.u0.validate(grid).map_err(|e| err("data.u0", e))?;
        d.u1.validate(grid).map_err(|e| err("data.u1", e))?;
        Ok((d.u0.clone(), d.u1.clone()))
    }

    pub fn initial_state(&self) -> Result<State, ConfigError> {
        let grid = self.grid()?;
        let params = self.params()?;
        let (u0, u1) = self.initial_data(&grid)?;
        let u = u0.build(&grid).map_err(|e| err("data.u0", e))?;
        let ut = u1.build(&grid).map_err(|e| err("data.u1", e))?;
        State::new(u, ut, 0.0, params).map_err(|e| err("data", e))
    }

    pub fn sigma0(&self) -> Result<f64, ConfigError> {
        let d = self.data()?;
        match d.sigma0 {
            Some(s) => {
                positive(s, "data.sigma0")?;
                Ok(s)
            }
            None => d.u0.known_radius().map(|a| 0.5 * a).ok_or_else(|| {
                err("data.sigma0", "required when data.u0 has no known radius")
            }),
        }
    }

    pub fn integrate_options(&self) -> Result<IntegrateOptions, ConfigError> {
        let s = self.scheme.ok_or_else(|| missing("scheme"))?;
        positive(s.dt, "scheme.dt")?;
        positive(s.t_final, "scheme.t_final")?;
        let steps = s.t_final / s.dt;
        check(
            (steps - steps.round()).abs() <= 1e-9 * steps.max(1.0),
            "scheme.t_final",
            "must be a whole number of dt steps",
        )?;
        check(s.output_stride >= 1, "scheme.output_stride", "must be at least 1")?;
        if let Some(d) = s.max_relative_drift {
            positive(d, "scheme.max_relative_drift")?;
        }
        if let Some(b) = s.boundary_warn {
            positive(b, "scheme.boundary_warn")?;
        }
        if let Scheme::PicardChain {
            c0,
            sigma,
            delta_max,
            tol,
            max_iter,
        } = s.integrator
        {
            positive(c0, "scheme.integrator.c0")?;
            check(sigma >= 0.0 && sigma.is_finite(), "scheme.integrator.sigma", "must be >= 0")?;
            positive(delta_max, "scheme.integrator.delta_max")?;
            positive(tol, "scheme.integrator.tol")?;
            check(max_iter >= 1, "scheme.integrator.max_iter", "must be at least 1")?;
        }
        Ok(IntegrateOptions {
            t_final: s.t_final,
            dt: s.dt,
            scheme: s.integrator,
            output_stride: s.output_stride,
            max_relative_drift: s.max_relative_drift,
            boundary_warn: s.boundary_warn,
        })
    }

    fn analyticity(&self) -> Result<&AnalyticitySection, ConfigError> {
        self.analyticity.as_ref().ok_or_else(|| missing("analyticity"))
    }

    pub fn fit_policy(&self) -> Result<FitPolicy, ConfigError> {
        let f = self.analyticity()?.fit;
        check(
            f.noise_floor > 0.0 && f.noise_floor < 1.0,
            "analyticity.fit.noise_floor",
            "must lie in (0, 1)",
        )?;
        check(
            f.top_decades >= 0.0 && f.top_decades.is_finite(),
            "analyticity.fit.top_decades",
            "must be >= 0",
        )?;
        check(f.s.is_finite(), "analyticity.fit.s", "must be finite")?;
        check(f.min_modes >= 3, "analyticity.fit.min_modes", "must be at least 3")?;
        positive(f.curvature_tol, "analyticity.fit.curvature_tol")?;
        Ok(f)
    }

    /// `(sigmas, delta)` for the drift sweep.
    pub fn sweep(&self) -> Result<(Vec<f64>, f64), ConfigError> {
        let a = self.analyticity()?;
        check(!a.sigmas.is_empty(), "analyticity.sigmas", "must not be empty")?;
        check(
            a.sigmas.iter().all(|s| *s >= 0.0 && s.is_finite())
                && a.sigmas.windows(2).all(|w| w[0] < w[1]),
            "analyticity.sigmas",
            "must be nonnegative and strictly increasing",
        )?;
        let delta = a.delta.ok_or_else(|| err("analyticity.delta", "missing"))?;
        positive(delta, "analyticity.delta")?;
        Ok((a.sigmas.clone(), delta))
    }

    /// Sampler and settings for the residual-constant fit. The corpus lives
    /// on the run's box and dimension at its own resolution.
    pub fn corpus(&self) -> Result<(FieldSampler, CorpusSection), ConfigError> {
        let c = self
            .analyticity()?
            .corpus
            .ok_or_else(|| missing("analyticity.corpus"))?;
        let grid = self.grid()?;
        check(
            c.points_per_dim >= 4 && c.points_per_dim % 2 == 0,
            "analyticity.corpus.points_per_dim",
            "must be even and at least 4",
        )?;
        check(c.band >= 1, "analyticity.corpus.band", "must be at least 1")?;
        positive(c.sigma, "analyticity.corpus.sigma")?;
        check(c.samples >= 1, "analyticity.corpus.samples", "must be at least 1")?;
        positive(c.h2_norm, "analyticity.corpus.h2_norm")?;
        let g = grid
            .with_points(c.points_per_dim)
            .map_err(|e| err("analyticity.corpus.points_per_dim", e))?;
        let sampler = FieldSampler::new(g, c.band)
            .map_err(|e| err("analyticity.corpus.band", e))?
            .normalized(c.h2_norm);
        Ok((sampler, c))
    }

    pub fn lemma_samples(&self) -> Option<u64> {
        self.lemmas.map(|l| l.samples)
    }

    pub fn output_dir(&self) -> Option<&Path> {
        self.output.as_ref().map(|o| o.dir.as_path())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[grid]
dim = 1
points_per_dim = 64
box_length = 20.0

[physics]
m = 1.0
p = 3

[data]
u0 = { family = "lorentz_pole", amplitude = 0.5, a = 0.5 }

[scheme]
integrator = { kind = "yoshida4" }
dt = 0.01
t_final = 1.0
output_stride = 10

[analyticity]
sigmas = [0.01, 0.02, 0.04]
delta = 1.0
fit = { min_modes = 6 }
corpus = { points_per_dim = 32, band = 6, sigma = 0.01, samples = 10 }

[seeds]
base = 3

[output]
dir = "runs/x"
"#;

    #[test]
    fn full_config_resolves() {
        let c = RunConfig::from_toml(FULL).unwrap();
        assert_eq!(c.sigma0().unwrap(), 0.25);
        assert_eq!(c.params().unwrap().coupling, 1.0);
        assert_eq!(c.fit_policy().unwrap().min_modes, 6);
        assert_eq!(c.integrate_options().unwrap().output_stride, 10);
        assert_eq!(c.sweep().unwrap().0.len(), 3);
        assert!(c.initial_state().is_ok());
        assert!(c.corpus().is_ok());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::from_toml(FULL).unwrap();
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(c, back);
        let picard = FULL.replace(
            r#"{ kind = "yoshida4" }"#,
            r#"{ kind = "picard_chain", c0 = 0.1, sigma = 0.0, delta_max = 0.05, tol = 1e-12, max_iter = 50 }"#,
        );
        let c = RunConfig::from_toml(&picard).unwrap();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn errors_name_the_field() {
        let e = RunConfig::from_toml(&FULL.replace("points_per_dim = 64", "points_per_dim = \"x\""))
            .unwrap_err();
        assert_eq!(e.path, "grid.points_per_dim");
        let e = RunConfig::from_toml(&FULL.replace("p = 3", "p = 3\nq = 1")).unwrap_err();
        assert_eq!(e.path, "physics.q");
        let c = RunConfig::from_toml(&FULL.replace("p = 3", "p = 4")).unwrap();
        assert_eq!(c.params().unwrap_err().path, "physics.p");
        let c = RunConfig::from_toml(&FULL.replace("t_final = 1.0", "t_final = 1.005")).unwrap();
        assert_eq!(c.integrate_options().unwrap_err().path, "scheme.t_final");
        let c = RunConfig::from_toml(&FULL.replace("0.02, 0.04", "0.04, 0.02")).unwrap();
        assert_eq!(c.sweep().unwrap_err().path, "analyticity.sigmas");
        let c = RunConfig::from_toml(&FULL.replace("a = 0.5 }", "a = -1.0 }")).unwrap();
        assert_eq!(c.initial_state().unwrap_err().path, "data.u0");
    }

    #[test]
    fn sections_are_optional_until_used() {
        let c = RunConfig::from_toml("[seeds]\nbase = 1\n").unwrap();
        assert_eq!(c.grid().unwrap_err().path, "grid");
        assert_eq!(c.integrate_options().unwrap_err().path, "scheme");
        assert_eq!(c.lemma_samples(), None);
    }
}
