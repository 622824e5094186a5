//! Run configuration: TOML file with `[gate]`, `[optimizer]` and `[output]`
//! sections, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::export::SnapshotFormat;
use crate::error::{Error, Result};
use crate::gates::{BcKind, GateKind, GateSpec, SiteSpec};
use crate::optimizer::{OptParams, UpdateRule};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<GateKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_hi: Option<f64>,
    /// Replaces the built-in site layout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<SiteSpec>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<UpdateRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<SnapshotFormat>,
}

/// On-disk configuration. A run manifest is a config file with an extra
/// `[result]` table, which is ignored when loading.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub gate: GateSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<toml::Table>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("config: cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Overlay `other` on top of `self`; fields set in `other` win.
    pub fn merge(mut self, other: ConfigFile) -> Self {
        macro_rules! overlay {
            ($sec:ident: $($f:ident),*) => { $( if other.$sec.$f.is_some() { self.$sec.$f = other.$sec.$f; } )* };
        }
        overlay!(gate: kind, bc, x, y, nx, ny, mass, t_hi, q_hi, sites);
        overlay!(optimizer: rho_min, rho_max, theta, q, p, k_min, k_max, mass, max_iters, rule, snapshot_stride);
        overlay!(output: dir, format);
        self
    }

    /// Apply a `key=value` optimizer override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
        let (key, value) = (key.trim(), value.trim());
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: {value:?} is not a number")))
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{key}: {value:?} is not a non-negative integer")))
        };
        let o = &mut self.optimizer;
        match key {
            "rho_min" => o.rho_min = Some(float()?),
            "rho_max" => o.rho_max = Some(float()?),
            "theta" => o.theta = Some(float()?),
            "q" => o.q = Some(float()?),
            "p" => o.p = Some(float()?),
            "k_min" => o.k_min = Some(float()?),
            "k_max" => o.k_max = Some(float()?),
            "mass" => o.mass = Some(float()?),
            "max_iters" => o.max_iters = Some(count()?),
            "snapshot_stride" => o.snapshot_stride = Some(count()?),
            "rule" => {
                o.rule = Some(match value {
                    "bang-bang" => UpdateRule::BangBang,
                    "euler" => UpdateRule::Euler,
                    _ => return Err(Error::Config(format!("rule: unknown rule {value:?}"))),
                })
            }
            _ => return Err(Error::Config(format!("unknown optimizer key {key:?}"))),
        }
        Ok(())
    }
}

/// Fully resolved settings for one gate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: GateSpec,
    pub x: bool,
    pub y: bool,
    pub params: OptParams,
    pub out_dir: PathBuf,
    pub format: SnapshotFormat,
}

fn bit(name: &str, v: Option<u8>) -> Result<bool> {
    match v {
        None | Some(0) => Ok(false),
        Some(1) => Ok(true),
        Some(other) => Err(Error::Config(format!("{name}: must be 0 or 1, got {other}"))),
    }
}

impl RunConfig {
    pub fn resolve(file: &ConfigFile) -> Result<Self> {
        let g = &file.gate;
        let kind = g
            .kind
            .ok_or_else(|| Error::Config("gate: kind is required (--gate)".into()))?;
        let bc = g
            .bc
            .ok_or_else(|| Error::Config("bc: boundary-condition kind is required (--bc)".into()))?;
        let mut spec = GateSpec::build(kind, bc);
        if let Some(v) = g.nx {
            spec.nx = v;
        }
        if let Some(v) = g.ny {
            spec.ny = v;
        }
        if let Some(v) = g.mass {
            spec.mass = v;
        }
        if let Some(v) = g.t_hi {
            spec.t_hi = v;
        }
        if let Some(v) = g.q_hi {
            spec.q_hi = v;
        }
        if let Some(sites) = &g.sites {
            spec.sites = sites.clone();
        }
        spec.validate()
            .map_err(|e| Error::Config(format!("gate: {e}")))?;

        let o = &file.optimizer;
        let mut params = spec.default_params();
        macro_rules! take {
            ($($f:ident => $($dst:ident).+),*) => { $( if let Some(v) = o.$f { params.$($dst).+ = v; } )* };
        }
        take!(rho_min => rho_min, rho_max => rho_max, theta => theta, q => q,
              p => conductivity.penalty, k_min => conductivity.k_min, k_max => conductivity.k_max,
              mass => mass, max_iters => max_iters, rule => rule, snapshot_stride => snapshot_stride);
        params
            .validate(spec.nx * spec.ny)
            .map_err(|e| match e {
                Error::InvalidArgument(msg) => Error::Config(msg),
                other => other,
            })?;

        Ok(Self {
            x: bit("x", g.x)?,
            y: bit("y", g.y)?,
            spec,
            params,
            out_dir: file.output.dir.clone().unwrap_or_else(|| PathBuf::from("out")),
            format: file.output.format.unwrap_or_default(),
        })
    }

    /// Config file that reproduces this run exactly.
    pub fn to_file(&self) -> ConfigFile {
        let p = &self.params;
        ConfigFile {
            gate: GateSection {
                kind: Some(self.spec.kind),
                bc: Some(self.spec.bc),
                x: Some(self.x as u8),
                y: Some(self.y as u8),
                nx: Some(self.spec.nx),
                ny: Some(self.spec.ny),
                mass: Some(self.spec.mass),
                t_hi: Some(self.spec.t_hi),
                q_hi: Some(self.spec.q_hi),
                sites: Some(self.spec.sites.clone()),
            },
            optimizer: OptimizerSection {
                rho_min: Some(p.rho_min),
                rho_max: Some(p.rho_max),
                theta: Some(p.theta),
                q: Some(p.q),
                p: Some(p.conductivity.penalty),
                k_min: Some(p.conductivity.k_min),
                k_max: Some(p.conductivity.k_max),
                mass: Some(p.mass),
                max_iters: Some(p.max_iters),
                rule: Some(p.rule),
                snapshot_stride: Some(p.snapshot_stride),
            },
            output: OutputSection {
                dir: Some(self.out_dir.clone()),
                format: Some(self.format),
            },
            result: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ConfigFile {
        ConfigFile::parse("[gate]\nkind = \"and\"\nbc = \"dirichlet\"\nx = 1\ny = 1\n").unwrap()
    }

    #[test]
    fn defaults_follow_the_gate() {
        let cfg = RunConfig::resolve(&base()).unwrap();
        assert_eq!(cfg.params.mass, 2000.0);
        assert_eq!(cfg.params.theta, 0.03);
        assert!(cfg.x && cfg.y);
        let file = ConfigFile::parse("[gate]\nkind = \"xor\"\nbc = \"neumann\"\n").unwrap();
        assert_eq!(RunConfig::resolve(&file).unwrap().params.mass, 400.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ConfigFile::parse("[optimizer]\nthetta = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("thetta"), "{err}");
        assert!(ConfigFile::parse("[extra]\na = 1\n").is_err());
        assert!(base().set("bogus=1").is_err());
    }

    #[test]
    fn invalid_override_names_the_field() {
        let mut file = base();
        file.set("rho_min=0").unwrap();
        let err = RunConfig::resolve(&file).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("rho_min")), "{err}");
    }

    #[test]
    fn later_layers_win() {
        let file = base().merge(ConfigFile {
            optimizer: OptimizerSection {
                theta: Some(0.05),
                ..Default::default()
            },
            ..Default::default()
        });
        let cfg = RunConfig::resolve(&file).unwrap();
        assert_eq!(cfg.params.theta, 0.05);
        assert_eq!(cfg.spec.kind, GateKind::And);
    }

    #[test]
    fn manifest_round_trip() {
        let mut file = base();
        file.set("max_iters=17").unwrap();
        file.set("rule=euler").unwrap();
        let cfg = RunConfig::resolve(&file).unwrap();
        let text = toml::to_string(&cfg.to_file()).unwrap();
        let again = RunConfig::resolve(&ConfigFile::parse(&text).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn bits_must_be_binary() {
        let file = ConfigFile::parse("[gate]\nkind = \"and\"\nbc = \"dirichlet\"\nx = 2\n").unwrap();
        assert!(RunConfig::resolve(&file).is_err());
    }
}
