//! Experiment definitions and their text-file form.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use capa_core::cov::CovOptions;
use capa_core::dinkelbach::DinkelbachOptions;
use capa_core::geometry::Aperture;
use capa_core::scenario::{config_from_entries, parse_sections, ScenarioConfig};
use capa_core::zf::ZfOptions;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Convergence,
    ApertureSweep,
    SpreadSweep,
    UsersSweep,
    RatefloorSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Convergence,
        Experiment::ApertureSweep,
        Experiment::SpreadSweep,
        Experiment::UsersSweep,
        Experiment::RatefloorSweep,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Experiment::Convergence => "convergence",
            Experiment::ApertureSweep => "aperture-sweep",
            Experiment::SpreadSweep => "spread-sweep",
            Experiment::UsersSweep => "users-sweep",
            Experiment::RatefloorSweep => "ratefloor-sweep",
        }
    }

    /// Aperture areas in m², spread radii in m, users per group, or rate
    /// floors in bit/s/Hz.
    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            Experiment::Convergence => vec![0.0625, 0.25, 1.0],
            Experiment::ApertureSweep => vec![0.0625, 0.25, 0.5, 1.0],
            Experiment::SpreadSweep => vec![0.5, 1.0, 2.0, 3.0],
            Experiment::UsersSweep => vec![1.0, 2.0, 3.0, 4.0],
            Experiment::RatefloorSweep => vec![0.0, 0.5, 1.0, 1.5],
        }
    }

    pub fn default_algorithms(self) -> Vec<Algorithm> {
        match self {
            Experiment::Convergence => vec![Algorithm::Cov, Algorithm::Zf],
            _ => Algorithm::ALL.to_vec(),
        }
    }

    /// Scenario configuration at one sweep value.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, HarnessError> {
        let mut c = base.clone();
        match self {
            Experiment::Convergence | Experiment::ApertureSweep => {
                c.aperture = Aperture::square(value)?;
            }
            Experiment::SpreadSweep => c.spread_radius = value,
            Experiment::UsersSweep => {
                if !(value >= 1.0) || value.fract() != 0.0 {
                    return Err(HarnessError::Spec(format!(
                        "users-sweep values must be positive integers, got {value}"
                    )));
                }
                c.users_per_group = value as usize;
            }
            Experiment::RatefloorSweep => c.rate_floors = vec![value; c.num_groups],
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| HarnessError::Spec(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Cov,
    Zf,
    SpdaCov,
    SpdaZf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Cov, Algorithm::Zf, Algorithm::SpdaCov, Algorithm::SpdaZf];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Cov => "cov",
            Algorithm::Zf => "zf",
            Algorithm::SpdaCov => "spda-cov",
            Algorithm::SpdaZf => "spda-zf",
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, Algorithm::SpdaCov | Algorithm::SpdaZf)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| HarnessError::Spec(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub sweep: Vec<f64>,
    pub num_realizations: usize,
    /// Realization `i` uses seed `base.rng_seed + i`.
    pub algorithms: Vec<Algorithm>,
    pub base: ScenarioConfig,
    pub output_dir: PathBuf,
    pub dinkelbach: DinkelbachOptions,
    pub cov: CovOptions,
    pub zf: ZfOptions,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    /// Write wall-clock times. Off gives byte-reproducible output.
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            experiment,
            sweep: experiment.default_sweep(),
            num_realizations: 10,
            algorithms: experiment.default_algorithms(),
            base: ScenarioConfig::default(),
            output_dir: output_dir.into(),
            dinkelbach: DinkelbachOptions::default(),
            cov: CovOptions::default(),
            zf: ZfOptions::default(),
            threads: None,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.sweep.is_empty() {
            return Err(HarnessError::Spec("sweep grid is empty".into()));
        }
        if self.num_realizations == 0 {
            return Err(HarnessError::Spec("need at least one realization".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Spec("no algorithms selected".into()));
        }
        for v in &self.sweep {
            self.experiment.apply(&self.base, *v)?;
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.num_realizations as u64).map(move |i| self.base.rng_seed + i)
    }

    /// Reads an experiment file: an `[experiment]` section, an optional
    /// `[config]` section with scenario fields and an optional `[solver]`
    /// section.
    ///
    /// ```text
    /// [experiment]
    /// id = aperture-sweep
    /// sweep = 0.0625 0.25 1
    /// realizations = 3
    /// algorithms = cov zf
    /// [config]
    /// rate_floors = 0.5
    /// [solver]
    /// tol = 1e-4
    /// ```
    pub fn from_text(text: &str, output_dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        let sections = parse_sections(text)?;
        let exp = sections
            .iter()
            .find(|s| s.name == "experiment")
            .ok_or_else(|| HarnessError::Spec("missing [experiment] section".into()))?;
        let id = exp
            .entries
            .iter()
            .find(|e| e.key == "id")
            .ok_or_else(|| HarnessError::Spec("missing experiment id".into()))?;
        let mut spec = ExperimentSpec::new(id.value.parse()?, output_dir);
        let bad = |line: usize, m: String| HarnessError::Spec(format!("line {line}: {m}"));
        for s in &sections {
            match s.name.as_str() {
                "experiment" => {
                    for e in &s.entries {
                        match e.key.as_str() {
                            "id" => {}
                            "sweep" => {
                                spec.sweep = e
                                    .value
                                    .split_whitespace()
                                    .map(|t| t.parse().map_err(|_| bad(e.line, format!("bad sweep value '{t}'"))))
                                    .collect::<Result<_, _>>()?;
                            }
                            "realizations" => {
                                spec.num_realizations = e
                                    .value
                                    .parse()
                                    .map_err(|_| bad(e.line, "bad realization count".into()))?;
                            }
                            "algorithms" => {
                                spec.algorithms =
                                    e.value.split_whitespace().map(str::parse).collect::<Result<_, _>>()?;
                            }
                            "output_dir" => spec.output_dir = PathBuf::from(&e.value),
                            "threads" => {
                                spec.threads =
                                    Some(e.value.parse().map_err(|_| bad(e.line, "bad thread count".into()))?)
                            }
                            "timing" => {
                                spec.timing = e
                                    .value
                                    .parse()
                                    .map_err(|_| bad(e.line, "timing must be true or false".into()))?
                            }
                            k => return Err(bad(e.line, format!("unknown experiment field '{k}'"))),
                        }
                    }
                }
                "config" => spec.base = config_from_entries(&s.entries, &spec.base)?,
                "solver" => {
                    for e in &s.entries {
                        let num = || -> Result<f64, HarnessError> {
                            e.value
                                .parse()
                                .map_err(|_| bad(e.line, format!("bad number '{}'", e.value)))
                        };
                        match e.key.as_str() {
                            "tol" => {
                                let t = num()?;
                                spec.dinkelbach.tol = t;
                                spec.cov.tol = t;
                                spec.zf.tol = t;
                            }
                            "eta0" => spec.dinkelbach.eta0 = num()?,
                            "max_outer" => spec.dinkelbach.max_outer = num()? as usize,
                            "max_bcd_iter" => {
                                spec.cov.max_bcd_iter = num()? as usize;
                                spec.zf.max_bcd_iter = num()? as usize;
                            }
                            "dual_tol" => spec.cov.dual_tol = num()?,
                            "max_dual_iter" => spec.cov.max_dual_iter = num()? as usize,
                            k => return Err(bad(e.line, format!("unknown solver field '{k}'"))),
                        }
                    }
                }
                other => return Err(bad(s.line, format!("unknown section [{other}]"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path, output_dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        Self::from_text(&std::fs::read_to_string(path)?, output_dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.id().parse::<Experiment>().unwrap(), e);
        }
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("fig9".parse::<Experiment>().is_err());
    }

    #[test]
    fn sweep_values_reach_the_config() {
        let base = ScenarioConfig::default();
        let c = Experiment::ApertureSweep.apply(&base, 1.0).unwrap();
        assert!((c.aperture.len_x - 1.0).abs() < 1e-15);
        let c = Experiment::UsersSweep.apply(&base, 4.0).unwrap();
        assert_eq!(c.users_per_group, 4);
        assert!(Experiment::UsersSweep.apply(&base, 2.5).is_err());
        let c = Experiment::RatefloorSweep.apply(&base, 0.5).unwrap();
        assert_eq!(c.rate_floors, vec![0.5; 3]);
    }

    #[test]
    fn parses_experiment_file() {
        let text = "[experiment]\nid = ratefloor-sweep\nsweep = 0 1\nrealizations = 2\nalgorithms = zf spda-zf\n\
                    [config]\nnum_groups = 2\nrng_seed = 7\n[solver]\ntol = 1e-3\n";
        let s = ExperimentSpec::from_text(text, "out").unwrap();
        assert_eq!(s.experiment, Experiment::RatefloorSweep);
        assert_eq!(s.sweep, vec![0.0, 1.0]);
        assert_eq!(s.algorithms, vec![Algorithm::Zf, Algorithm::SpdaZf]);
        assert_eq!(s.base.num_groups, 2);
        assert_eq!(s.seeds().collect::<Vec<_>>(), vec![7, 8]);
        assert_eq!(s.zf.tol, 1e-3);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ExperimentSpec::from_text("[config]\nnum_groups = 2\n", "o").is_err());
        assert!(ExperimentSpec::from_text("[experiment]\nid = convergence\nsweep =\n", "o").is_err());
        assert!(ExperimentSpec::from_text("[experiment]\nid = convergence\nrealizations = 0\n", "o").is_err());
        assert!(ExperimentSpec::from_text("[experiment]\nid = convergence\ncolour = red\n", "o").is_err());
    }
}
