//! Analysis configuration and the zeros file format.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::diagnostics::{BallGrid, ContainmentResolution, QuadratureSpec, TargetGrid};
use crate::error::{Error, Result};
use crate::geometry::DiskPoint;

pub const CONFIG_SCHEMA: &str = "bc-config/1";

/// Radii handed to the battery must stay below this.
pub const RADIUS_LIMIT: f64 = 1.0 - 1e-12;
pub const MIN_GRID_LEVEL: u32 = 3;
pub const MAX_GRID_LEVEL: u32 = 24;

/// Parses a zeros file: one `re,im` pair per line, `#` comment lines and
/// blank lines ignored.
pub fn parse_zeros_file(path: &Path) -> Result<Vec<DiskPoint>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_zeros(&text, path)
}

/// [`parse_zeros_file`] on an in-memory string; `path` only labels errors.
pub fn parse_zeros(text: &str, path: &Path) -> Result<Vec<DiskPoint>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { path: path.to_path_buf(), line: i + 1, message };
        let mut parts = line.split(',');
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => return Err(err(format!("expected `re,im`, found `{line}`"))),
        };
        let re: f64 = re.parse().map_err(|_| err(format!("`{re}` is not a number")))?;
        let im: f64 = im.parse().map_err(|_| err(format!("`{im}` is not a number")))?;
        let p = DiskPoint::from_re_im(re, im).map_err(|e| err(e.to_string()))?;
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    /// Zeros as `[re, im]` pairs; ignored when `zeros_file` is set.
    #[serde(default)]
    pub zeros: Vec<[f64; 2]>,
    /// CSV of zeros, relative to the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros_file: Option<PathBuf>,
    #[serde(default)]
    pub prefactor_angle: f64,
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec { zeros: vec![[0.0, 0.0]], zeros_file: None, prefactor_angle: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Grid points with `|z| > r_max` are dropped.
    pub r_max: f64,
    pub base_level: u32,
    pub max_level: u32,
    /// Deepest level used by the expensive image-area and containment sweeps.
    pub coarse_level: u32,
    /// Hyperbolic radius of the balls `B_h(z, R)`.
    pub radius: f64,
    pub boundary_samples: usize,
    pub quadrature: QuadratureSpec,
    pub target_grid: TargetGrid,
    pub ball_grid: BallGrid,
    pub containment: ContainmentResolution,
    /// Relative depth limit of descent, light-subsquare and light-subarc searches.
    pub search_depth: u32,
    /// Length of the sampled geodesic rays.
    pub ray_length: f64,
    pub ray_samples: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            r_max: 0.995,
            base_level: 3,
            max_level: 12,
            coarse_level: 5,
            radius: 1.0,
            boundary_samples: 512,
            quadrature: QuadratureSpec::default(),
            target_grid: TargetGrid { radial: 16, angular: 32 },
            ball_grid: BallGrid::default(),
            containment: ContainmentResolution::default(),
            search_depth: 8,
            ray_length: 12.0,
            ray_samples: 48,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityConfig {
    /// The `a` grid is the origin plus dyadic centers of levels 3 through this.
    pub a_level: u32,
    pub r_max: f64,
    pub rungs: usize,
    /// Hyperbolic size of the random perturbation applied to the critical set.
    pub perturbation: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { a_level: 5, r_max: 1.0 - 1e-4, rungs: 4, perturbation: 0.05 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grids_dir: Option<PathBuf>,
}

fn default_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

fn default_alphas() -> Vec<f64> {
    (0..8).map(|k| TAU * k as f64 / 8.0).collect()
}

fn default_eps() -> Vec<f64> {
    vec![0.5, 0.25, 0.1]
}

fn default_distortion_eps() -> Vec<f64> {
    vec![0.1, 0.25, 0.5, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default)]
    pub map: MapSpec,
    /// Clark measure parameters as angles of `α` on the circle.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    /// `ε` values for descent and light sub-square/sub-arc searches.
    #[serde(default = "default_eps")]
    pub eps_ladder: Vec<f64>,
    /// Clearances `ε` of the distortion profile.
    #[serde(default = "default_distortion_eps")]
    pub distortion_eps: Vec<f64>,
    #[serde(default)]
    pub density: DensityConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            schema: default_schema(),
            map: MapSpec::default(),
            alphas: default_alphas(),
            grid: GridConfig::default(),
            eps_ladder: default_eps(),
            distortion_eps: default_distortion_eps(),
            density: DensityConfig::default(),
            output: OutputConfig::default(),
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    /// A default configuration for the given zeros.
    pub fn for_zeros(zeros: &[DiskPoint], prefactor_angle: f64) -> Self {
        AnalysisConfig {
            map: MapSpec {
                zeros: zeros.iter().map(|z| [z.value().re, z.value().im]).collect(),
                zeros_file: None,
                prefactor_angle,
            },
            ..AnalysisConfig::default()
        }
    }

    /// Reads a JSON config; a `zeros_file` is loaded (relative to the
    /// config's directory) into `map.zeros`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let mut config: AnalysisConfig = serde_json::from_str(&text)?;
        if let Some(file) = config.map.zeros_file.take() {
            let file = match path.parent() {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file,
            };
            config.set_zeros(&parse_zeros_file(&file)?);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn set_zeros(&mut self, zeros: &[DiskPoint]) {
        self.map.zeros = zeros.iter().map(|z| [z.value().re, z.value().im]).collect();
        self.map.zeros_file = None;
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::invalid(format!("unsupported config schema `{}`", self.schema)));
        }
        if self.map.zeros.is_empty() {
            return Err(Error::invalid("the map needs at least one zero"));
        }
        let g = &self.grid;
        for (name, r) in [("grid.r_max", g.r_max), ("density.r_max", self.density.r_max)] {
            if !(r > 0.0 && r < RADIUS_LIMIT) {
                return Err(Error::invalid(format!("{name} = {r} must lie in (0, 1 - 1e-12)")));
            }
        }
        if !(self.density.r_max > 0.5) {
            return Err(Error::invalid("density.r_max must exceed 1/2"));
        }
        for (name, level) in [
            ("grid.base_level", g.base_level),
            ("grid.max_level", g.max_level),
            ("grid.coarse_level", g.coarse_level),
            ("density.a_level", self.density.a_level),
        ] {
            if !(MIN_GRID_LEVEL..=MAX_GRID_LEVEL).contains(&level) {
                return Err(Error::invalid(format!(
                    "{name} = {level} outside [{MIN_GRID_LEVEL}, {MAX_GRID_LEVEL}]"
                )));
            }
        }
        if g.base_level > g.max_level || g.coarse_level < g.base_level {
            return Err(Error::invalid("need base_level ≤ max_level and base_level ≤ coarse_level"));
        }
        if !(g.radius > 0.0 && g.radius.is_finite()) {
            return Err(Error::invalid("grid.radius must be positive"));
        }
        if g.boundary_samples < 64 {
            return Err(Error::invalid("grid.boundary_samples must be at least 64"));
        }
        if g.ray_samples < 2 || !(g.ray_length > 0.0 && g.ray_length.is_finite()) {
            return Err(Error::invalid("rays need a positive length and at least two samples"));
        }
        if g.search_depth == 0 || g.search_depth > 20 {
            return Err(Error::invalid("grid.search_depth must lie in [1, 20]"));
        }
        if self.eps_ladder.is_empty() || self.eps_ladder.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::invalid("eps_ladder entries must lie in (0, 1)"));
        }
        if self.distortion_eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::invalid("distortion_eps entries must be positive"));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("alphas must be a non-empty list of finite angles"));
        }
        if self.density.rungs == 0 || !(self.density.perturbation >= 0.0) {
            return Err(Error::invalid("density needs at least one rung and a non-negative perturbation"));
        }
        Ok(())
    }

    pub fn blaschke(&self) -> Result<BlaschkeProduct> {
        let zeros: Vec<Complex64> = self.map.zeros.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        BlaschkeProduct::from_complex(&zeros, self.map.prefactor_angle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_file_examples() {
        let p = Path::new("zeros.csv");
        let z = parse_zeros("0.0,0.0\n0.5,0.0", p).unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(z[1].value(), Complex64::new(0.5, 0.0));
        let z = parse_zeros("# comment\n0.9,0.0\n", p).unwrap();
        assert_eq!(z.len(), 1);
        assert!(matches!(parse_zeros("1.0,0.0", p), Err(Error::Parse { line: 1, .. })));
        match parse_zeros("0.1,0.2\n\n0.3;0.4", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_zeros("0.1,abc", p).is_err());
        assert!(parse_zeros("0.1,0.2,0.3", p).is_err());
    }

    #[test]
    fn config_round_trip_and_defaults() {
        let c = AnalysisConfig::default();
        c.validate().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: AnalysisConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        let partial: AnalysisConfig = serde_json::from_str(r#"{"map": {"zeros": [[0.5, 0.0]]}, "seed": 3}"#).unwrap();
        assert_eq!(partial.grid, GridConfig::default());
        assert_eq!(partial.seed, 3);
        assert!(serde_json::from_str::<AnalysisConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation_limits() {
        let mut c = AnalysisConfig::default();
        c.grid.max_level = 25;
        assert!(c.validate().is_err());
        let mut c = AnalysisConfig::default();
        c.grid.r_max = 1.0 - 1e-13;
        assert!(c.validate().is_err());
        let c = AnalysisConfig { eps_ladder: vec![1.0], ..AnalysisConfig::default() };
        assert!(c.validate().is_err());
    }
}
