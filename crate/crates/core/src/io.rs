//! Run configuration, CSV time series, JSON snapshots and the run manifest.
//!
//! Configuration comes from command-line flags and an optional TOML file
//! whose keys are the flag names (`t-max = 10.0`, `preset = "sphere:1"`).
//! Flags override the file. A run manifest is itself a valid config file:
//! its `[config]` table echoes every resolved setting.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, FlowConfig, FlowMode, FlowState, Scheme, TimeStep, Trajectory};
use crate::geometry::RadialGraph;
use crate::grid::{Grid, Topology};
use crate::hyptrig::LambdaParams;
use crate::presets::{self, Preset, PresetSpec};

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

pub const TIMESERIES_HEADER: &str =
    "t,area,volume,h_bar,sup_dev,kappa_margin,rho_min,rho_max,renorm_delta";

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const MANIFEST_FILE: &str = "manifest.toml";

fn parse_mode(s: &str) -> std::result::Result<FlowMode, String> {
    match s {
        "mcf" => Ok(FlowMode::Mcf),
        "vpmcf" => Ok(FlowMode::Vpmcf),
        _ => Err(format!("expected mcf or vpmcf, got '{s}'")),
    }
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    match s {
        "rk2" => Ok(Scheme::Rk2),
        "semi-implicit" => Ok(Scheme::SemiImplicit),
        _ => Err(format!("expected rk2 or semi-implicit, got '{s}'")),
    }
}

fn parse_switch(s: &str) -> std::result::Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(format!("expected on or off, got '{s}'")),
    }
}

/// `None` for `off`.
fn parse_stop_tol(s: &str) -> std::result::Result<StopTolerance, String> {
    if s == "off" {
        return Ok(StopTolerance(None));
    }
    s.parse::<f64>()
        .map(|v| StopTolerance(Some(v)))
        .map_err(|_| format!("expected a number or off, got '{s}'"))
}

/// `--stop-tol` value; `None` for `off`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopTolerance(pub Option<f64>);

#[derive(Debug, Clone, Default, Parser)]
#[command(
    name = "hypflow",
    version,
    about = "Volume-preserving mean curvature flow in hyperbolic space"
)]
pub struct Cli {
    /// Sectional curvature (negative) [default: -1]
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Hypersurface dimension n [default: 1]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of grid nodes m [default: 256]
    #[arg(long)]
    pub grid: Option<usize>,
    /// mcf or vpmcf [default: vpmcf]
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<FlowMode>,
    /// rk2 or semi-implicit [default: rk2]
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    /// Initial condition as name:params [default: sphere:1]
    #[arg(long)]
    pub preset: Option<String>,
    /// Fixed time step
    #[arg(long, conflicts_with = "cfl")]
    pub dt: Option<f64>,
    /// CFL number of the adaptive step [default: 0.25]
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Final time [default: 10]
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Volume renormalization, on or off [default: on]
    #[arg(long, value_parser = parse_switch)]
    pub renormalize: Option<bool>,
    /// Stop once sup|H - mean H| falls to this value, or off [default: off]
    #[arg(long, value_parser = parse_stop_tol)]
    pub stop_tol: Option<StopTolerance>,
    /// Output directory [default: out]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output interval [default: 0.1]
    #[arg(long)]
    pub cadence: Option<f64>,
    /// TOML configuration file or run manifest
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<FlowMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renormalize: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cadence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: PresetSpec,
    pub flow: FlowConfig,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: PresetSpec::default(),
            flow: FlowConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// The settings as a config file that reproduces them.
    pub fn to_file(&self) -> ConfigFile {
        let (dt, cfl) = match self.flow.time_step {
            TimeStep::Fixed(dt) => (Some(dt), None),
            TimeStep::Cfl(c) => (None, Some(c)),
        };
        ConfigFile {
            lambda: Some(self.preset.lambda.lambda()),
            dim: Some(self.preset.n),
            grid: Some(self.preset.m),
            mode: Some(self.flow.mode),
            scheme: Some(self.flow.scheme),
            preset: Some(self.preset.preset.to_string()),
            dt,
            cfl,
            t_max: Some(self.flow.t_max),
            renormalize: Some(self.flow.renormalize_volume),
            stop_tol: self.flow.stop_tolerance,
            target_volume: self.flow.target_volume,
            min_dt: Some(self.flow.min_dt),
            cadence: Some(self.flow.cadence),
            out: Some(self.out.clone()),
        }
    }
}

/// Reads a config file or the `[config]` table of a run manifest.
pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)?;
    let bad = |e: toml::de::Error| Error::Config(format!("{}: {}", path.display(), e.message()));
    let mut table: toml::Table = toml::from_str(&text).map_err(bad)?;
    if table.contains_key("version") {
        if let Some(toml::Value::Table(config)) = table.remove("config") {
            table = config;
        }
    }
    table.try_into().map_err(bad)
}

/// Parses command-line arguments (including the program name) into a run
/// configuration.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(clap_reason(&e)))?;
    resolve(&cli)
}

/// First line of a clap error without the `error: ` prefix.
pub fn clap_reason(e: &clap::Error) -> String {
    let text = e.to_string();
    let line = text.lines().next().unwrap_or("invalid arguments");
    line.strip_prefix("error: ").unwrap_or(line).to_string()
}

/// Merges flags over the optional config file over the defaults.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => load_config_file(path)?,
        None => ConfigFile::default(),
    };
    let defaults = RunConfig::default();

    let lambda = cli
        .lambda
        .or(file.lambda)
        .unwrap_or(defaults.preset.lambda.lambda());
    let lambda = LambdaParams::new(lambda).map_err(|e| Error::Config(e.to_string()))?;
    let n = cli.dim.or(file.dim).unwrap_or(defaults.preset.n);
    let m = cli.grid.or(file.grid).unwrap_or(defaults.preset.m);
    if n == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    Grid::new(Topology::for_dim(n), n, m).map_err(|e| Error::Config(e.to_string()))?;
    let preset = match cli.preset.as_ref().or(file.preset.as_ref()) {
        Some(text) => text.parse::<Preset>()?,
        None => Preset::default(),
    };

    let time_step = match (cli.dt, cli.cfl, file.dt, file.cfl) {
        (Some(dt), _, _, _) => TimeStep::Fixed(dt),
        (None, Some(c), _, _) => TimeStep::Cfl(c),
        (None, None, Some(_), Some(_)) => {
            return Err(Error::Config("config file sets both dt and cfl".into()))
        }
        (None, None, Some(dt), None) => TimeStep::Fixed(dt),
        (None, None, None, Some(c)) => TimeStep::Cfl(c),
        (None, None, None, None) => defaults.flow.time_step,
    };

    let base = defaults.flow;
    let flow = FlowConfig {
        mode: cli.mode.or(file.mode).unwrap_or(base.mode),
        scheme: cli.scheme.or(file.scheme).unwrap_or(base.scheme),
        time_step,
        t_max: cli.t_max.or(file.t_max).unwrap_or(base.t_max),
        renormalize_volume: cli
            .renormalize
            .or(file.renormalize)
            .unwrap_or(base.renormalize_volume),
        target_volume: file.target_volume.or(base.target_volume),
        stop_tolerance: match cli.stop_tol {
            Some(StopTolerance(tol)) => tol,
            None => file.stop_tol.or(base.stop_tolerance),
        },
        cadence: cli.cadence.or(file.cadence).unwrap_or(base.cadence),
        min_dt: file.min_dt.unwrap_or(base.min_dt),
    };
    flow.validate()?;

    Ok(RunConfig {
        preset: PresetSpec {
            preset,
            lambda,
            n,
            m,
        },
        flow,
        out: cli.out.clone().or(file.out).unwrap_or(defaults.out),
    })
}

/// Writes the output rows as CSV with 17 significant digits.
pub fn write_timeseries(path: &Path, trajectory: &Trajectory) -> Result<()> {
    fs::write(path, timeseries_csv(trajectory)?)?;
    Ok(())
}

pub fn timeseries_csv(trajectory: &Trajectory) -> Result<String> {
    if trajectory.rows.is_empty() {
        return Err(Error::Domain("empty trajectory".into()));
    }
    let mut out = String::from(TIMESERIES_HEADER);
    out.push('\n');
    for r in &trajectory.rows {
        let values = [
            r.t,
            r.area,
            r.volume,
            r.h_bar,
            r.sup_dev,
            r.kappa_margin,
            r.rho_min,
            r.rho_max,
            r.renorm_delta,
        ];
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Serialized state of one radial graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub schema_version: u32,
    pub lambda: f64,
    pub topology: Topology,
    pub n: usize,
    pub m: usize,
    pub t: f64,
    /// Volume preserved by the run that wrote the snapshot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_volume: Option<f64>,
    pub rho: Vec<f64>,
}

impl Snapshot {
    pub fn from_state(state: &FlowState, target_volume: Option<f64>) -> Self {
        let g = &state.graph;
        Self {
            schema_version: SNAPSHOT_SCHEMA_VERSION,
            lambda: g.params().lambda(),
            topology: g.grid().topology(),
            n: g.n(),
            m: g.rho().len(),
            t: state.t,
            target_volume,
            rho: g.rho().values().to_vec(),
        }
    }

    pub fn to_graph(&self) -> Result<RadialGraph> {
        let bad = |e: Error| Error::Format(format!("invalid snapshot: {e}"));
        if self.schema_version != SNAPSHOT_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "snapshot schema version {} is not supported (expected {SNAPSHOT_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.topology != Topology::for_dim(self.n) {
            return Err(Error::Format(format!(
                "topology {:?} does not match n = {}",
                self.topology, self.n
            )));
        }
        if self.rho.len() != self.m {
            return Err(Error::Format(format!(
                "rho has {} entries, m = {}",
                self.rho.len(),
                self.m
            )));
        }
        if !self.t.is_finite() {
            return Err(Error::Format("snapshot time is not finite".into()));
        }
        let params = LambdaParams::new(self.lambda).map_err(bad)?;
        let grid = Grid::new(self.topology, self.n, self.m).map_err(bad)?;
        RadialGraph::from_values(grid, self.rho.clone(), params).map_err(bad)
    }

    pub fn into_state(self) -> Result<FlowState> {
        let graph = self.to_graph()?;
        Ok(FlowState::new(graph, self.t))
    }
}

pub fn write_snapshot(path: &Path, state: &FlowState, target_volume: Option<f64>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Snapshot::from_state(state, target_volume))
        .map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads and validates a snapshot.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path)?;
    let snapshot: Snapshot = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    snapshot.to_graph()?;
    Ok(snapshot)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunManifest {
    pub version: String,
    pub started: String,
    pub finished: String,
    /// `time-limit`, `converged`, or the error that ended the run.
    pub termination: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    pub config: ConfigFile,
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let text = toml::to_string(manifest).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {}", path.display(), e.message())))
}

/// Result of [`execute`].
#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub manifest: RunManifest,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// Runs the configured flow and writes the time series, the final snapshot
/// and the manifest into `config.out`. A manifest is written even when the
/// run fails.
pub fn execute(config: &RunConfig) -> Result<RunOutcome> {
    let started = now();
    fs::create_dir_all(&config.out)?;
    let mut resolved = config.clone();

    let result =
        presets::build_initial_state(&config.preset).and_then(|(state, snapshot_target)| {
            if resolved.flow.target_volume.is_none() && resolved.flow.mode == FlowMode::Vpmcf {
                resolved.flow.target_volume = snapshot_target;
            }
            flow::run_from(state, &resolved.flow)
        });

    let mut manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished: String::new(),
        termination: String::new(),
        steps: None,
        final_time: None,
        config: resolved.to_file(),
    };
    match result {
        Ok(trajectory) => {
            write_timeseries(&config.out.join(TIMESERIES_FILE), &trajectory)?;
            let target = (config.flow.mode == FlowMode::Vpmcf).then_some(trajectory.initial_volume);
            write_snapshot(
                &config.out.join(SNAPSHOT_FILE),
                &trajectory.final_state,
                target,
            )?;
            manifest.termination = match trajectory.termination {
                flow::Termination::TimeLimit => "time-limit".into(),
                flow::Termination::Converged => "converged".into(),
            };
            manifest.steps = Some(trajectory.steps);
            manifest.final_time = Some(trajectory.final_state.t);
            manifest.finished = now();
            write_manifest(&config.out.join(MANIFEST_FILE), &manifest)?;
            Ok(RunOutcome {
                trajectory,
                manifest,
            })
        }
        Err(e) => {
            manifest.termination = e.to_string();
            manifest.finished = now();
            write_manifest(&config.out.join(MANIFEST_FILE), &manifest)?;
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("hypflow".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn defaults() {
        let c = parse_config(args("")).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.preset.lambda.lambda(), -1.0);
        assert_eq!((c.preset.n, c.preset.m), (1, 256));
        assert_eq!(c.flow.mode, FlowMode::Vpmcf);
        assert_eq!(c.preset.preset, Preset::Sphere { r0: 1.0 });
    }

    #[test]
    fn flag_mapping() {
        let c = parse_config(args("--mode mcf --preset sphere:1 --t-max 0.2")).unwrap();
        assert_eq!(c.flow.mode, FlowMode::Mcf);
        assert_eq!(c.flow.t_max, 0.2);

        let c = parse_config(args(
            "--lambda -4 --dim 2 --grid 65 --scheme semi-implicit --dt 1e-4 --renormalize off \
             --stop-tol 1e-9 --cadence 0.05 --out runs/a --preset perturbed:1,0.1,2",
        ))
        .unwrap();
        assert_eq!(c.preset.lambda.lambda(), -4.0);
        assert_eq!((c.preset.n, c.preset.m), (2, 65));
        assert_eq!(c.flow.scheme, Scheme::SemiImplicit);
        assert_eq!(c.flow.time_step, TimeStep::Fixed(1e-4));
        assert!(!c.flow.renormalize_volume);
        assert_eq!(c.flow.stop_tolerance, Some(1e-9));
        assert_eq!(c.flow.cadence, 0.05);
        assert_eq!(c.out, PathBuf::from("runs/a"));
        assert_eq!(
            c.preset.preset,
            Preset::PerturbedSphere {
                r0: 1.0,
                amplitude: 0.1,
                k: 2
            }
        );

        let c = parse_config(args("--lambda=-2 --cfl 0.1 --stop-tol off")).unwrap();
        assert_eq!(c.preset.lambda.lambda(), -2.0);
        assert_eq!(c.flow.time_step, TimeStep::Cfl(0.1));
        assert_eq!(c.flow.stop_tolerance, None);
    }

    #[test]
    fn rejected_arguments() {
        for bad in [
            "--grid 4",
            "--dt 1e-4 --cfl 0.2",
            "--mode fast",
            "--renormalize yes",
            "--lambda 1",
            "--lambda 0",
            "--preset cube:1",
            "--t-max -1",
            "--cfl 2",
            "--frobnicate",
            "--dim 0",
        ] {
            match parse_config(args(bad)) {
                Err(Error::Config(reason)) => assert!(!reason.contains('\n'), "{bad}: {reason}"),
                other => panic!("{bad}: expected a configuration error, got {other:?}"),
            }
        }
    }

    #[test]
    fn file_values_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "t-max = 2.5\ngrid = 128\npreset = \"perturbed:1,0.1,2\"\ndt = 1e-4\nmode = \"mcf\"\n",
        )
        .unwrap();
        let p = path.display();
        let c = parse_config(args(&format!("--config {p}"))).unwrap();
        assert_eq!(c.flow.t_max, 2.5);
        assert_eq!(c.preset.m, 128);
        assert_eq!(c.flow.time_step, TimeStep::Fixed(1e-4));
        assert_eq!(c.flow.mode, FlowMode::Mcf);

        let c = parse_config(args(&format!(
            "--config {p} --grid 64 --cfl 0.2 --mode vpmcf"
        )))
        .unwrap();
        assert_eq!(c.preset.m, 64);
        assert_eq!(c.flow.time_step, TimeStep::Cfl(0.2));
        assert_eq!(c.flow.mode, FlowMode::Vpmcf);
        assert_eq!(c.flow.t_max, 2.5);
    }

    #[test]
    fn bad_files() {
        let dir = tempfile::tempdir().unwrap();
        for (name, text) in [
            ("unknown.toml", "t-max = 1.0\nspeed = 3\n"),
            ("both.toml", "dt = 1e-4\ncfl = 0.2\n"),
            ("type.toml", "grid = \"many\"\n"),
        ] {
            let path = dir.path().join(name);
            fs::write(&path, text).unwrap();
            let r = parse_config(args(&format!("--config {}", path.display())));
            assert!(matches!(r, Err(Error::Config(_))), "{name}: {r:?}");
        }
        let missing = dir.path().join("absent.toml");
        assert!(matches!(
            parse_config(args(&format!("--config {}", missing.display()))),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn config_echo_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let original = parse_config(args(
            "--lambda -0.5 --dim 2 --grid 33 --dt 1e-5 --stop-tol 1e-7 --preset offset:1,0.2,0.3",
        ))
        .unwrap();
        let manifest = RunManifest {
            version: "0".into(),
            started: "a".into(),
            finished: "b".into(),
            termination: "time-limit".into(),
            steps: Some(3),
            final_time: Some(0.1),
            config: original.to_file(),
        };
        let path = dir.path().join(MANIFEST_FILE);
        write_manifest(&path, &manifest).unwrap();
        assert_eq!(read_manifest(&path).unwrap(), manifest);
        let reloaded = parse_config(args(&format!("--config {}", path.display()))).unwrap();
        assert_eq!(reloaded, original);
    }

    fn sample_trajectory() -> Trajectory {
        let spec = PresetSpec {
            preset: Preset::PerturbedSphere {
                r0: 1.0,
                amplitude: 0.1,
                k: 2,
            },
            m: 64,
            ..Default::default()
        };
        let g = presets::build_preset(&spec).unwrap();
        flow::run(
            g,
            &FlowConfig {
                t_max: 0.3,
                cadence: 0.1,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn csv_layout() {
        let traj = sample_trajectory();
        let csv = timeseries_csv(&traj).unwrap();
        assert!(csv.ends_with('\n'));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TIMESERIES_HEADER);
        assert_eq!(lines.len(), 1 + 4);
        for (line, row) in lines[1..].iter().zip(&traj.rows) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 9);
            let t: f64 = fields[0].parse().unwrap();
            assert_eq!(t, row.t);
            let v: f64 = fields[2].parse().unwrap();
            assert_eq!(v, row.volume);
            // 17 significant digits: d.dddddddddddddddde±x
            let mantissa = fields[1].split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 18, "{}", fields[1]);
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(SNAPSHOT_FILE);
        let traj = sample_trajectory();
        let state = &traj.final_state;
        write_snapshot(&path, state, Some(traj.initial_volume)).unwrap();
        let snap = read_snapshot(&path).unwrap();
        assert_eq!(snap.target_volume, Some(traj.initial_volume));
        assert_eq!(snap.t, state.t);
        let back = snap.into_state().unwrap();
        assert_eq!(back.graph, state.graph);
        assert_eq!(back.volume, state.volume);
    }

    #[test]
    fn snapshot_rejects_invalid_content() {
        let dir = tempfile::tempdir().unwrap();
        let state = FlowState::new(
            presets::build_preset(&PresetSpec {
                m: 16,
                ..Default::default()
            })
            .unwrap(),
            0.0,
        );
        let good = Snapshot::from_state(&state, None);

        let mut cases = Vec::new();
        let mut s = good.clone();
        s.rho[3] = -0.5;
        cases.push(serde_json::to_string(&s).unwrap());
        let mut s = good.clone();
        s.schema_version = 2;
        cases.push(serde_json::to_string(&s).unwrap());
        let mut s = good.clone();
        s.m = 17;
        cases.push(serde_json::to_string(&s).unwrap());
        let mut s = good.clone();
        s.topology = Topology::Axisymmetric;
        cases.push(serde_json::to_string(&s).unwrap());
        cases.push("{\"schema_version\": 1}".to_string());
        cases.push(
            serde_json::to_string(&good)
                .unwrap()
                .replace("\"t\"", "\"time\""),
        );

        for (i, text) in cases.into_iter().enumerate() {
            let path = dir.path().join(format!("bad{i}.json"));
            fs::write(&path, text).unwrap();
            assert!(
                matches!(read_snapshot(&path), Err(Error::Format(_))),
                "case {i}"
            );
        }
    }
}
