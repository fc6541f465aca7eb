//! Files read and written by the command-line tool.
//!
//! Kernel and simulation definitions are TOML. Numeric exports are CSV,
//! JSON and binary PGM. Floats are written with Rust's shortest round-trip
//! formatting so repeated runs produce identical bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mcsim::SimConfig;
use crate::optimal::ConditionReport;
use crate::spectral::{CorrelationKernel, SpectralDecomposition};
use crate::tuning::{Field2D, PowerAllocation, TuningPopulation1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Explicit,
    Exponential,
    Gaussian,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelParams {
    /// `c_0..c_{n/2}` for the explicit family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

/// Kernel definition file.
///
/// ```toml
/// n = 4
/// family = "explicit"
/// [params]
/// values = [1.0, 0.5, 0.25]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub n: usize,
    pub family: KernelFamily,
    #[serde(default)]
    pub params: KernelParams,
}

impl KernelSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::MalformedKernel(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("kernel spec serializes")
    }

    pub fn build(&self) -> Result<CorrelationKernel> {
        let missing = |name: &str| Error::MalformedKernel(format!("{:?} family needs params.{name}", self.family));
        let p = &self.params;
        match self.family {
            KernelFamily::Explicit => {
                CorrelationKernel::new(self.n, p.values.clone().ok_or_else(|| missing("values"))?)
            }
            KernelFamily::Exponential => CorrelationKernel::exponential(
                self.n,
                p.c0.unwrap_or(1.0),
                p.rho.ok_or_else(|| missing("rho"))?,
            ),
            KernelFamily::Gaussian => CorrelationKernel::gaussian(
                self.n,
                p.c0.unwrap_or(1.0),
                p.length.ok_or_else(|| missing("length"))?,
            ),
        }
    }

    /// Explicit spec reproducing `kernel`.
    pub fn explicit(kernel: &CorrelationKernel) -> Self {
        Self {
            n: kernel.n(),
            family: KernelFamily::Explicit,
            params: KernelParams {
                values: Some(kernel.values().to_vec()),
                ..KernelParams::default()
            },
        }
    }
}

/// `k,lambda,paired` rows for every frequency `0..=n/2`.
pub fn write_decomposition_csv<W: Write>(decomp: &SpectralDecomposition, mut w: W) -> Result<()> {
    writeln!(w, "k,lambda,paired")?;
    for m in decomp.modes() {
        writeln!(w, "{},{},{}", m.frequency, m.eigenvalue, m.paired)?;
    }
    Ok(())
}

/// `theta,neuron_0,..` rows of `f(θ) + offset`.
pub fn write_population_csv<W: Write>(pop: &TuningPopulation1D, thetas: &[f64], offset: f64, mut w: W) -> Result<()> {
    write!(w, "theta")?;
    for i in 0..pop.n() {
        write!(w, ",neuron_{i}")?;
    }
    writeln!(w)?;
    for (theta, row) in thetas.iter().zip(pop.sample_curves(thetas)) {
        write!(w, "{theta}")?;
        for v in row {
            write!(w, ",{}", v + offset)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Row `a` holds `θx = 2πa/r`, columns step through `θy`.
pub fn write_field_csv<W: Write>(field: &Field2D, mut w: W) -> Result<()> {
    let r = field.resolution();
    for a in 0..r {
        let row: Vec<String> = (0..r).map(|b| field.get(a, b).to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// 8-bit values, min-max normalized. A constant field maps to 0.
pub fn field_to_gray(field: &Field2D) -> Vec<u8> {
    let (lo, hi) = field.min_max();
    let span = hi - lo;
    field
        .values()
        .iter()
        .map(|&v| {
            if span > 0.0 {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect()
}

/// Binary graymap with a `P5 r r 255` header.
pub fn write_pgm<W: Write>(field: &Field2D, mut w: W) -> Result<()> {
    let r = field.resolution();
    writeln!(w, "P5 {r} {r} 255")?;
    w.write_all(&field_to_gray(field))?;
    Ok(())
}

/// Parses a binary graymap written by [`write_pgm`]: `(width, height, pixels)`.
pub fn read_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |m: &str| Error::InvalidConfig(format!("not a P5 graymap: {m}"));
    let end = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| bad("no header line"))?;
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| bad("header is not text"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "P5" || parts[3] != "255" {
        return Err(bad(header));
    }
    let width: usize = parts[1].parse().map_err(|_| bad("width"))?;
    let height: usize = parts[2].parse().map_err(|_| bad("height"))?;
    let pixels = bytes[end + 1..].to_vec();
    if pixels.len() != width * height {
        return Err(bad("pixel count"));
    }
    Ok((width, height, pixels))
}

/// Fisher-information report written by `grid-fisher fisher`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherExport {
    pub n: usize,
    pub allocation: PowerAllocation,
    pub fi_spectral: f64,
    pub theta_samples: Vec<f64>,
    pub fi_theta: Vec<f64>,
    pub fi_max_bound: f64,
    pub crb: f64,
    pub i_x: f64,
    pub i_y: f64,
    pub i_xy: f64,
    #[serde(rename = "condition_eq39")]
    pub condition: ConditionReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationKind {
    /// Concentrate on the smallest paired eigenvalue.
    Optimal,
    /// All power on frequency `k`.
    Single,
    /// Explicit `[k, T²]` pairs.
    Weights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub kind: PopulationKind,
    #[serde(default = "unit_power")]
    pub power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<(usize, f64)>>,
}

fn unit_power() -> f64 {
    1.0
}

impl PopulationSpec {
    pub fn build(&self, decomp: &SpectralDecomposition) -> Result<TuningPopulation1D> {
        let n = decomp.n();
        match self.kind {
            PopulationKind::Optimal => crate::tuning::optimal_tuning_1d(decomp, self.power),
            PopulationKind::Single => {
                let k = self
                    .k
                    .ok_or_else(|| Error::InvalidConfig("population kind \"single\" needs k".into()))?;
                TuningPopulation1D::new(n, PowerAllocation::single(n, k, self.power)?)
            }
            PopulationKind::Weights => {
                let w = self
                    .weights
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("population kind \"weights\" needs weights".into()))?;
                TuningPopulation1D::new(n, PowerAllocation::from_weights(n, w)?)
            }
        }
    }
}

/// Simulation definition file.
///
/// ```toml
/// [kernel]
/// n = 4
/// family = "explicit"
/// params = { values = [1.0, 0.5, 0.25] }
///
/// [population]
/// kind = "optimal"
/// power = 1.0
///
/// [simulation]
/// trials = 100000
/// seed = 7
/// mode = "known_reference"
/// estimator = "local_linear"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationFile {
    pub kernel: KernelSpec,
    pub population: PopulationSpec,
    #[serde(default)]
    pub simulation: SimConfig,
}

impl SimulationFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            arguments,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
