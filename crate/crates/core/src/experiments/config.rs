use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dgdd::{ComponentPool, Physics, ReferenceDomain};
use crate::error::{Error, Result};
use crate::mesh::{gen_circle_obstacle, gen_quad_grid, gen_tri_grid, parse_mesh, Mesh2D};
use crate::physics::{SpiralRange, DEFAULT_VISCOSITY};

/// How a reference component's mesh is obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mesh", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Quad { n: usize },
    Tri { n: usize },
    Circle { radius: f64, n_boundary: usize, n_ring: usize },
    /// MESH1 file, relative paths resolved against the config file.
    File { path: PathBuf },
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh2D> {
        match self {
            MeshSpec::Quad { n } => gen_quad_grid(*n),
            MeshSpec::Tri { n } => gen_tri_grid(*n),
            MeshSpec::Circle { radius, n_boundary, n_ring } => gen_circle_obstacle(*radius, *n_boundary, *n_ring),
            MeshSpec::File { path } => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
                parse_mesh(&text)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub name: String,
    #[serde(flatten)]
    pub mesh: MeshSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    /// Poisson: solves per component. Stokes: 2x2 sample domains.
    pub samples: usize,
    /// Modes stored per reference; smaller ranks are leading submatrices.
    pub max_rank: usize,
    /// Training range: `k, k_b ~ U[-k_max, k_max]^2` (Poisson).
    pub k_max: f64,
    /// Training range: `g ~ U[-g_max, g_max]^2` (Stokes).
    pub g_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleupConfig {
    /// Layouts are `n x n` for each `n` listed.
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub rank: usize,
    /// Largest component count for which the full-order model is solved.
    pub fom_cutoff: usize,
    pub k_max: f64,
    pub g_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankSweepConfig {
    pub ranks: Vec<usize>,
    pub size: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolateConfig {
    pub size: usize,
    pub trials: usize,
    pub rank: usize,
    /// Spiral parameter ranges (Poisson).
    pub spiral: SpiralRange,
    /// Peak inflow speed of the channel (Stokes); the channel spans the
    /// layout height.
    pub u_in: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsConfig {
    /// Elements per side at each level.
    pub levels: Vec<usize>,
    /// `quad` or `tri`.
    pub shape: String,
    pub tol: f64,
    /// Iteration cap is `max_iter_factor * unknowns`.
    pub max_iter_factor: usize,
    pub sweeps: usize,
}

/// Everything an experiment command needs; loaded from TOML with the
/// physics' desk defaults filling unspecified keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub physics: Physics,
    pub seed: u64,
    pub out: PathBuf,
    pub nu: f64,
    pub components: Vec<ComponentSpec>,
    pub train: TrainConfig,
    pub scaleup: ScaleupConfig,
    pub ranksweep: RankSweepConfig,
    pub extrapolate: ExtrapolateConfig,
    pub mms: MmsConfig,
}

fn mms_defaults() -> MmsConfig {
    MmsConfig { levels: vec![8, 16, 32, 64], shape: "tri".into(), tol: 1e-10, max_iter_factor: 50, sweeps: 1 }
}

impl ExperimentConfig {
    /// Single 16x16 quadrilateral component, 300 snapshots.
    pub fn poisson_desk() -> Self {
        ExperimentConfig {
            physics: Physics::Poisson,
            seed: 42,
            out: PathBuf::from("out/poisson"),
            nu: 1.0,
            components: vec![ComponentSpec { name: "empty".into(), mesh: MeshSpec::Quad { n: 16 } }],
            train: TrainConfig { samples: 300, max_rank: 30, k_max: 0.5, g_max: 1.0 },
            scaleup: ScaleupConfig { sizes: vec![4, 8], trials: 20, rank: 15, fom_cutoff: 64, k_max: 0.7, g_max: 1.5 },
            ranksweep: RankSweepConfig { ranks: vec![8, 12, 16, 24, 30], size: 4, trials: 20 },
            extrapolate: ExtrapolateConfig { size: 4, trials: 20, rank: 15, spiral: SpiralRange::default(), u_in: 1.0 },
            mms: mms_defaults(),
        }
    }

    /// Empty and circular-obstacle components at 8x8 resolution, 100 sample
    /// domains.
    pub fn stokes_desk() -> Self {
        ExperimentConfig {
            physics: Physics::Stokes,
            seed: 42,
            out: PathBuf::from("out/stokes"),
            nu: DEFAULT_VISCOSITY,
            components: vec![
                ComponentSpec { name: "empty".into(), mesh: MeshSpec::Quad { n: 8 } },
                ComponentSpec {
                    name: "circle".into(),
                    mesh: MeshSpec::Circle { radius: 0.25, n_boundary: 8, n_ring: 4 },
                },
            ],
            train: TrainConfig { samples: 100, max_rank: 36, k_max: 0.5, g_max: 1.0 },
            scaleup: ScaleupConfig { sizes: vec![4], trials: 10, rank: 36, fom_cutoff: 64, k_max: 0.7, g_max: 1.5 },
            ranksweep: RankSweepConfig { ranks: vec![8, 16, 24, 36], size: 4, trials: 10 },
            extrapolate: ExtrapolateConfig { size: 4, trials: 10, rank: 36, spiral: SpiralRange::default(), u_in: 1.0 },
            mms: mms_defaults(),
        }
    }

    pub fn desk(physics: Physics) -> Self {
        match physics {
            Physics::Poisson => Self::poisson_desk(),
            Physics::Stokes => Self::stokes_desk(),
        }
    }

    /// Parses TOML. `physics` is required; every other key defaults to the
    /// desk configuration of that physics. Tables merge key by key, arrays
    /// replace.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg = Self::parse(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn parse(text: &str) -> Result<Self> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let physics: Physics = user
            .get("physics")
            .ok_or_else(|| Error::Config("missing key `physics`".into()))?
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("physics: {e}")))?;
        let toml::Value::Table(mut base) =
            toml::Value::try_from(Self::desk(physics)).map_err(|e| Error::Config(e.to_string()))?
        else {
            unreachable!("config serializes to a table")
        };
        merge(&mut base, user);
        toml::Value::Table(base).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative mesh paths are resolved against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let mut cfg = Self::parse(&text)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for c in &mut cfg.components {
            if let MeshSpec::File { path } = &mut c.mesh {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.components.is_empty() {
            return bad("at least one component is required".into());
        }
        let mut names: Vec<&str> = self.components.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("component names must be unique".into());
        }
        for c in &self.components {
            if c.name.is_empty() || c.name.contains(|ch: char| ch == '_' || ch.is_whitespace()) {
                return bad(format!("component name `{}` must be nonempty without `_` or spaces", c.name));
            }
            if let MeshSpec::File { path } = &c.mesh {
                if !path.exists() {
                    return bad(format!("mesh file {} does not exist", path.display()));
                }
            }
        }
        if !(self.nu > 0.0) {
            return bad(format!("nu = {} must be positive", self.nu));
        }
        if self.train.samples == 0 || self.train.max_rank == 0 {
            return bad("train.samples and train.max_rank must be positive".into());
        }
        // Each Poisson solve adds one column; each Stokes sample four, spread over the pool.
        let columns = match self.physics {
            Physics::Poisson => self.train.samples,
            Physics::Stokes => 4 * self.train.samples,
        };
        if self.train.max_rank > columns {
            return bad(format!("train.max_rank {} exceeds the {columns} snapshots", self.train.max_rank));
        }
        for (what, r) in [("scaleup.rank", self.scaleup.rank), ("extrapolate.rank", self.extrapolate.rank)]
            .into_iter()
            .chain(self.ranksweep.ranks.iter().map(|&r| ("ranksweep.ranks", r)))
        {
            if r == 0 || r > self.train.max_rank {
                return bad(format!("{what} = {r} outside 1..={}", self.train.max_rank));
            }
        }
        if self.scaleup.sizes.is_empty() || self.scaleup.sizes.contains(&0) || self.scaleup.trials == 0 {
            return bad("scaleup needs nonzero sizes and trials".into());
        }
        if self.ranksweep.size == 0 || self.ranksweep.trials == 0 || self.ranksweep.ranks.is_empty() {
            return bad("ranksweep needs a size, trials and ranks".into());
        }
        if self.extrapolate.size == 0 || self.extrapolate.trials == 0 {
            return bad("extrapolate needs a size and trials".into());
        }
        if self.mms.levels.len() < 3 || self.mms.levels.contains(&0) {
            return bad("mms needs at least three nonzero levels".into());
        }
        if !matches!(self.mms.shape.as_str(), "quad" | "tri") {
            return bad(format!("mms.shape `{}` must be quad or tri", self.mms.shape));
        }
        Ok(())
    }

    /// Builds every component of the pool for the configured physics.
    pub fn pool(&self) -> Result<ComponentPool> {
        let mut pool = ComponentPool::new();
        for c in &self.components {
            let mesh = Arc::new(c.mesh.build()?);
            pool.insert(match self.physics {
                Physics::Poisson => ReferenceDomain::poisson(&c.name, mesh)?,
                Physics::Stokes => ReferenceDomain::stokes(&c.name, mesh)?,
            });
        }
        Ok(pool)
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_keys() {
        let cfg = ExperimentConfig::from_toml("physics = \"poisson\"\n[scaleup]\ntrials = 3\nsizes = [2, 4]\n").unwrap();
        assert_eq!(cfg.scaleup.trials, 3);
        assert_eq!(cfg.scaleup.sizes, vec![2, 4]);
        assert_eq!(cfg.scaleup.rank, 15);
        assert_eq!(cfg.train.samples, 300);
        let s = ExperimentConfig::from_toml("physics = \"stokes\"").unwrap();
        assert_eq!(s, ExperimentConfig::stokes_desk());
    }

    #[test]
    fn round_trips_through_toml() {
        for cfg in [ExperimentConfig::poisson_desk(), ExperimentConfig::stokes_desk()] {
            assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "seed = 1",
            "physics = \"poisson\"\n[train]\nmax_rank = 400",
            "physics = \"poisson\"\n[scaleup]\nrank = 31",
            "physics = \"poisson\"\nbogus = 1",
            "physics = \"stokes\"\n[mms]\nlevels = [8, 16]",
            "physics = \"poisson\"\n[[components]]\nname = \"a_b\"\nmesh = \"quad\"\nn = 2",
            "physics = \"poisson\"\n[[components]]\nname = \"f\"\nmesh = \"file\"\npath = \"/nonexistent.mesh\"",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn components_parse_and_build() {
        let text = "physics = \"stokes\"\n[[components]]\nname = \"c\"\nmesh = \"circle\"\nradius = 0.3\nn_boundary = 4\nn_ring = 2\n";
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let pool = cfg.pool().unwrap();
        assert_eq!(pool.names().collect::<Vec<_>>(), ["c"]);
        assert!(pool.get("c").unwrap().pressure().is_some());
    }
}
