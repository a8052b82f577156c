//! Named initial conditions.
//!
//! Presets are written `name:params` on the command line:
//! `sphere:r0`, `perturbed:r0,amplitude,k`, `offset:r_s,z0,z1[,z2,...]` and
//! `custom:path/to/snapshot.json`. Built-in presets must be h-convex at grid
//! resolution; a parameter choice that is not is rejected.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::diagnostics::h_convexity_margin;
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::{offset_sphere_graph, RadialGraph};
use crate::grid::{Grid, Topology};
use crate::hyptrig::LambdaParams;
use crate::io;

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Sphere {
        r0: f64,
    },
    /// `r0 + a cos(kθ)` on a circle, `r0 + a P_k(cos θ)` on an axisymmetric
    /// grid.
    PerturbedSphere {
        r0: f64,
        amplitude: f64,
        k: u32,
    },
    /// Geodesic sphere of radius `r_s + z0` centered at normal coordinates
    /// `z`; missing trailing components of `z` are zero.
    OffsetSphere {
        r_s: f64,
        z0: f64,
        z: Vec<f64>,
    },
    /// A snapshot file; grid and curvature come from the file.
    Custom {
        file: PathBuf,
    },
}

impl Default for Preset {
    fn default() -> Self {
        Preset::Sphere { r0: 1.0 }
    }
}

fn parse_numbers(name: &str, params: &str) -> Result<Vec<f64>> {
    params
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("preset {name}: '{p}' is not a number")))
        })
        .collect()
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (name, params) = text.split_once(':').unwrap_or((text, ""));
        let arity = |got: usize, want: &str| {
            Error::Config(format!("preset {name} takes {want} parameters, got {got}"))
        };
        match name {
            "sphere" => {
                if params.is_empty() {
                    return Ok(Preset::Sphere { r0: 1.0 });
                }
                match parse_numbers(name, params)?[..] {
                    [r0] => Ok(Preset::Sphere { r0 }),
                    ref v => Err(arity(v.len(), "1")),
                }
            }
            "perturbed" | "perturbed-sphere" => match parse_numbers(name, params)?[..] {
                [r0, amplitude, k] => {
                    if k.fract() != 0.0 || !(0.0..=1024.0).contains(&k) {
                        return Err(Error::Config(format!(
                            "preset {name}: harmonic must be a nonnegative integer, got {k}"
                        )));
                    }
                    Ok(Preset::PerturbedSphere {
                        r0,
                        amplitude,
                        k: k as u32,
                    })
                }
                ref v => Err(arity(v.len(), "3")),
            },
            "offset" | "offset-sphere" => {
                let v = parse_numbers(name, params)?;
                if v.len() < 3 {
                    return Err(arity(v.len(), "at least 3"));
                }
                Ok(Preset::OffsetSphere {
                    r_s: v[0],
                    z0: v[1],
                    z: v[2..].to_vec(),
                })
            }
            "custom" if !params.is_empty() => Ok(Preset::Custom {
                file: PathBuf::from(params),
            }),
            "custom" => Err(Error::Config("preset custom needs a file path".into())),
            _ => Err(Error::Config(format!("unknown preset '{name}'"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Sphere { r0 } => write!(f, "sphere:{r0}"),
            Preset::PerturbedSphere { r0, amplitude, k } => {
                write!(f, "perturbed:{r0},{amplitude},{k}")
            }
            Preset::OffsetSphere { r_s, z0, z } => {
                write!(f, "offset:{r_s},{z0}")?;
                z.iter().try_for_each(|v| write!(f, ",{v}"))
            }
            Preset::Custom { file } => write!(f, "custom:{}", file.display()),
        }
    }
}

/// A preset together with the grid and curvature it is built on.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetSpec {
    pub preset: Preset,
    pub lambda: LambdaParams,
    pub n: usize,
    pub m: usize,
}

impl Default for PresetSpec {
    fn default() -> Self {
        Self {
            preset: Preset::default(),
            lambda: LambdaParams::default(),
            n: 1,
            m: 256,
        }
    }
}

/// Legendre polynomial `P_k(x)` by the three-term recurrence.
pub fn legendre(k: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0) * x * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

/// Builds the initial graph of `spec`.
pub fn build_preset(spec: &PresetSpec) -> Result<RadialGraph> {
    Ok(build_initial_state(spec)?.0.graph)
}

/// Initial state and, for snapshots that carry one, the volume the
/// original run was preserving.
///
/// Built-in presets start at `t = 0`; custom presets resume at the
/// snapshot's time.
pub fn build_initial_state(spec: &PresetSpec) -> Result<(FlowState, Option<f64>)> {
    if let Preset::Custom { file } = &spec.preset {
        let snapshot = io::read_snapshot(file)?;
        let target = snapshot.target_volume;
        return Ok((snapshot.into_state()?, target));
    }

    let grid = Grid::new(Topology::for_dim(spec.n), spec.n, spec.m)?;
    let params = spec.lambda;
    let graph = match &spec.preset {
        Preset::Sphere { r0 } => {
            positive("sphere radius", *r0)?;
            RadialGraph::from_values(grid.clone(), vec![*r0; spec.m], params)?
        }
        Preset::PerturbedSphere { r0, amplitude, k } => {
            positive("sphere radius", *r0)?;
            if !(amplitude.abs() < *r0) {
                return Err(Error::Config(format!(
                    "perturbation amplitude {amplitude} must be smaller than the radius {r0}"
                )));
            }
            let (a, k) = (*amplitude, *k);
            let rho = match grid.topology() {
                Topology::Circle => grid.field_from_fn(|t| r0 + a * (k as f64 * t).cos())?,
                Topology::Axisymmetric => grid.field_from_fn(|t| r0 + a * legendre(k, t.cos()))?,
            };
            RadialGraph::new(grid.clone(), rho, params)?
        }
        Preset::OffsetSphere { r_s, z0, z } => {
            positive("sphere radius", *r_s)?;
            if z.len() > spec.n + 1 {
                return Err(Error::Config(format!(
                    "center offset has {} components, at most {} allowed",
                    z.len(),
                    spec.n + 1
                )));
            }
            let mut full = z.clone();
            full.resize(spec.n + 1, 0.0);
            offset_sphere_graph(&grid, params, *r_s, *z0, &full)?
        }
        Preset::Custom { .. } => unreachable!(),
    };

    let margin = h_convexity_margin(&graph);
    if !(margin > 0.0) {
        return Err(Error::Config(format!(
            "preset {} is not h-convex on this grid (curvature margin {margin:e})",
            spec.preset
        )));
    }
    Ok((FlowState::new(graph, 0.0), None))
}
