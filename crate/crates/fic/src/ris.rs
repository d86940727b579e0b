//! RIS phase configurations.
//!
//! A configuration is a length-`N_I` vector of phases in `[0, 2pi)` together
//! with a sub-block assignment and a frozen mask used by the multipath
//! procedure, where blocks of elements are fixed one step at a time.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use crate::channel::ArrayGeometry;
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Wraps a phase into `[0, 2pi)`.
pub(crate) fn wrap_two_pi(phase: f64) -> f64 {
    let w = phase.rem_euclid(TWO_PI);
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

/// Phase for element `k` (0-based) of a configuration aligned to slope
/// `omega = 2 pi (d/lambda) (sin theta - sin eta)`.
pub(crate) fn element_phase(omega: f64, k: usize) -> f64 {
    wrap_two_pi(omega * k as f64)
}

/// An (AoD toward D, AoA from S) couple at the RIS, both within
/// `[-pi/2, pi/2]` measured from the array firing direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    pub theta: f64,
    pub eta: f64,
}

impl AnglePair {
    pub fn new(theta: f64, eta: f64) -> Result<Self> {
        let half = PI / 2.0;
        if !theta.is_finite() || !eta.is_finite() {
            return Err(Error::NonFinite("angle pair"));
        }
        if theta < -half || theta > half || eta < -half || eta > half {
            return Err(Error::InvalidParameter(format!(
                "angle pair ({theta}, {eta}) outside [-pi/2, pi/2]"
            )));
        }
        Ok(Self { theta, eta })
    }

    /// Clamps both angles to `[-pi/2, pi/2]`.
    pub fn clamped(theta: f64, eta: f64) -> Self {
        let half = PI / 2.0;
        Self {
            theta: theta.clamp(-half, half),
            eta: eta.clamp(-half, half),
        }
    }
}

/// Length-`N_I` phase vector with unit-modulus semantics, plus the sub-block
/// bookkeeping for multipath operation.
#[derive(Debug, Clone, PartialEq)]
pub struct RisConfig {
    phases: Vec<f64>,
    block_assignment: Vec<usize>,
    frozen_mask: Vec<bool>,
}

impl RisConfig {
    /// All-zero phases, single block, nothing frozen.
    pub fn neutral(num_elements: usize) -> Self {
        Self {
            phases: vec![0.0; num_elements],
            block_assignment: vec![1; num_elements],
            frozen_mask: vec![false; num_elements],
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn block_assignment(&self) -> &[usize] {
        &self.block_assignment
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    pub fn set_phase(&mut self, k: usize, phase: f64) {
        self.phases[k] = wrap_two_pi(phase);
    }

    pub fn num_frozen(&self) -> usize {
        self.frozen_mask.iter().filter(|&&f| f).count()
    }

    /// Writes rows `index,phase,block,frozen` (1-based index) with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,phase,block,frozen")?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{}",
                k + 1,
                self.phases[k],
                self.block_assignment[k],
                u8::from(self.frozen_mask[k])
            )?;
        }
        Ok(())
    }

    /// Reads the format produced by [`RisConfig::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut phases = Vec::new();
        let mut blocks = Vec::new();
        let mut frozen = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!(
                    "config CSV line {}: expected 4 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let phase: f64 = fields[1]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("config CSV line {}: {e}", lineno + 1)))?;
            let block: usize = fields[2]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("config CSV line {}: {e}", lineno + 1)))?;
            let flag: u8 = fields[3]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("config CSV line {}: {e}", lineno + 1)))?;
            phases.push(wrap_two_pi(phase));
            blocks.push(block);
            frozen.push(flag != 0);
        }
        if phases.is_empty() {
            return Err(Error::Empty("config CSV has no rows"));
        }
        Ok(Self {
            phases,
            block_assignment: blocks,
            frozen_mask: frozen,
        })
    }
}

/// Configuration aligned to an angle pair:
/// `phi_k = 2 pi (d/lambda) (sin theta - sin eta) (k-1)`, wrapped to
/// `[0, 2pi)`. Single block, nothing frozen.
pub fn config_from_angles(pair: &AnglePair, geometry: &ArrayGeometry) -> RisConfig {
    let omega = TWO_PI * geometry.spacing_over_lambda * (pair.theta.sin() - pair.eta.sin());
    let phases = (0..geometry.num_elements)
        .map(|k| element_phase(omega, k))
        .collect();
    RisConfig {
        phases,
        block_assignment: vec![1; geometry.num_elements],
        frozen_mask: vec![false; geometry.num_elements],
    }
}

/// Frozen elements keep `base` phases, unfrozen elements take `update`
/// phases; the mask and block assignment are carried from `base`.
pub fn overlay_configs(base: &RisConfig, update: &RisConfig) -> Result<RisConfig> {
    if base.len() != update.len() {
        return Err(Error::DimensionMismatch {
            context: "overlay_configs",
            expected: (base.len(), 1),
            found: (update.len(), 1),
        });
    }
    let mut out = base.clone();
    for k in 0..base.len() {
        if !base.frozen_mask[k] {
            out.phases[k] = update.phases[k];
        }
    }
    Ok(out)
}

/// Marks frozen the elements with 1-based indices `m, m+M, m+2M, ...`
/// (stride `M`, i.e. `M-1` elements between consecutive fixed ones) and
/// assigns them block index `m`. Earlier frozen marks are kept.
pub fn freeze_block(config: &RisConfig, step: usize, num_blocks: usize) -> Result<RisConfig> {
    if num_blocks == 0 || step == 0 || step > num_blocks {
        return Err(Error::InvalidParameter(format!(
            "freeze_block: step {step} out of range 1..={num_blocks}"
        )));
    }
    if config.len() % num_blocks != 0 {
        return Err(Error::InvalidParameter(format!(
            "freeze_block: {} blocks do not divide {} elements",
            num_blocks,
            config.len()
        )));
    }
    let mut out = config.clone();
    let mut k = step - 1;
    while k < out.len() {
        out.frozen_mask[k] = true;
        out.block_assignment[k] = step;
        k += num_blocks;
    }
    Ok(out)
}

/// Rounds each phase to the nearest multiple of `2pi / 2^bits`, result in
/// `[0, 2pi)`.
pub fn quantize_phases(config: &RisConfig, bits: u32) -> Result<RisConfig> {
    if bits == 0 {
        return Err(Error::InvalidParameter(
            "quantize_phases needs at least 1 bit".into(),
        ));
    }
    let levels = (1u64 << bits) as f64;
    let step = TWO_PI / levels;
    let mut out = config.clone();
    for p in out.phases.iter_mut() {
        *p = wrap_two_pi((*p / step).round() * step);
    }
    Ok(out)
}
